#pragma once

#include "hbtree/hb.hpp"
#include "hbtree/params.hpp"

#include <memory>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hbtree {

inline constexpr std::uint64_t kUnregisteredLeaf = UINT64_MAX;

struct MasterSecret {
    Seed value;
};

// What a registered tag carries: one y-key per tree level on its root-to-leaf
// path plus the (x_t, y_t) authentication pair. true_leaf is bookkeeping for
// tests and the simulator, never sent on the wire.
struct TagCredential {
    std::vector<BitVector> path_keys;
    BitVector x_t;
    BitVector y_t;
    std::uint64_t true_leaf = kUnregisteredLeaf;

    // k_y*(d+1) + k_x, the tag's storage requirement.
    std::size_t storage_bits() const;
};

// Tag -> reader, first flow: one shared challenge matrix B (r x k_y) and one
// r_tr-bit response per level, all computed against the top r_tr rows of B.
struct TraversalMessage {
    BitMatrix b_m;
    std::vector<BitVector> z_levels;
};

struct OpCounts {
    std::uint64_t reader_matvec = 0;
    std::uint64_t tag_matvec = 0;
    std::uint64_t bits_sent = 0;     // tag -> reader
    std::uint64_t bits_received = 0; // reader -> tag

    OpCounts& operator+=(const OpCounts& o);
};

struct DescentResult {
    std::uint64_t leaf = 0;
    std::vector<std::uint32_t> path;
};

// Per-level statistics collected while the descent is still on the true
// path. strict_false_events counts levels where some false sibling was
// strictly closer than the true child -- the event the closed-form
// false-branch formulas model. departures counts realized wrong branches
// (including index tie-breaks).
struct LevelObservation {
    std::uint64_t on_path_levels = 0;
    std::uint64_t strict_false_events = 0;
    std::uint64_t departures = 0;

    LevelObservation& operator+=(const LevelObservation& o);
};

struct ProtocolOutcome {
    std::uint64_t identified_leaf = 0;
    bool accepted = false;
    std::uint32_t distance = 0;
    std::uint32_t repeats_used = 0;
    OpCounts ops;
    std::vector<std::uint32_t> path;
};

// Full transcript of one run for the trace dump.
struct Transcript {
    TraversalMessage traversal;
    BitMatrix a_m;
    BitVector z;
    std::uint64_t identified_leaf = 0;
    std::uint32_t distance = 0;
    bool accepted = false;
};

// Reader-side state: the key tree. Node keys are derived on demand from the
// master secret and cached per parent, so directories with millions of
// leaves never materialize the tree.
class TreeDirectory {
public:
    TreeDirectory(TreeDirectory&&) noexcept;
    TreeDirectory& operator=(TreeDirectory&&) noexcept;
    ~TreeDirectory();

    static TreeDirectory setup_system(std::uint64_t n_bound, const ProtocolParams& params,
                                      SeededStream& stream);

    const ProtocolParams& params() const { return params_; }
    const MasterSecret& master() const { return master_; }
    std::uint64_t capacity() const { return capacity_; }
    std::size_t registered_count() const { return leaf_by_tag_.size(); }

    std::vector<std::uint32_t> path_of_leaf(std::uint64_t leaf) const;
    std::uint64_t leaf_of_path(std::span<const std::uint32_t> path) const;

    // Key of the node reached by `path` from the root (path must be
    // non-empty and within (d, beta)).
    BitVector node_key(std::span<const std::uint32_t> path) const;

    // All beta child keys of the node at `parent_path` (empty = root), one
    // key per row; cached after first use. Safe to call concurrently.
    const BitMatrix& children_keys(std::span<const std::uint32_t> parent_path) const;

    HbPlusKeys leaf_auth_keys(std::uint64_t leaf) const;

    // Assigns a uniformly random unused leaf and hands out the credential.
    TagCredential register_tag(std::uint64_t tag_id, SeededStream& stream);
    std::uint64_t leaf_of_tag(std::uint64_t tag_id) const;

    DescentResult descend(const TraversalMessage& msg) const {
        return descend(msg, {}, nullptr);
    }
    // When true_path is non-empty, fills per-level statistics against it.
    DescentResult descend(const TraversalMessage& msg, std::span<const std::uint32_t> true_path,
                          LevelObservation* obs) const;

private:
    TreeDirectory() = default;

    ProtocolParams params_;
    MasterSecret master_;
    std::uint64_t capacity_ = 0;

    std::unordered_map<std::uint64_t, std::uint64_t> leaf_by_tag_;
    std::vector<std::uint64_t> free_leaves_;        // small capacities
    std::unordered_set<std::uint64_t> used_leaves_; // large capacities
    bool use_free_list_ = false;

    struct KeyCache;
    std::unique_ptr<KeyCache> cache_;
};

// Tag side of the tree-traversal stage: fresh B plus one noisy response per
// level, sharing B across all levels.
TraversalMessage tag_traversal_respond(const TagCredential& cred, const ProtocolParams& params,
                                       SeededStream& stream);

// One traversal + authentication round trip. The tag owns B and all noise,
// the reader owns A; both streams derive from trial_seed. Optional transcript
// and per-level statistics (the latter only when cred is registered).
ProtocolOutcome run_protocol_once(const TreeDirectory& dir, const TagCredential& cred,
                                  const Seed& trial_seed, Transcript* trace = nullptr,
                                  LevelObservation* obs = nullptr);

// Repeats run_protocol_once up to params.s times until an accept.
ProtocolOutcome run_protocol_iterated(const TreeDirectory& dir, const TagCredential& cred,
                                      const Seed& trial_seed, LevelObservation* obs = nullptr);

// Fresh random keys, not present in any directory.
TagCredential make_impostor_credential(const ProtocolParams& params, SeededStream& stream);

} // namespace hbtree
