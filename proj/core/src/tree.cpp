#include "hbtree/tree.hpp"

#include <cstring>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>

namespace hbtree {

namespace {

// Capacities up to this use a Fisher-Yates free list; beyond it, rejection
// sampling against the used-leaf set.
constexpr std::uint64_t kFreeListLimit = std::uint64_t{1} << 22;

std::string canonical_path(std::span<const std::uint32_t> path) {
    std::string s;
    for (std::size_t level = 0; level < path.size(); ++level) {
        if (level) s.push_back('/');
        s += std::to_string(level + 1);
        s.push_back(':');
        s += std::to_string(path[level]);
    }
    return s;
}

std::uint64_t node_id(std::uint64_t beta, std::span<const std::uint32_t> path) {
    std::uint64_t id = 0;
    for (std::uint32_t idx : path) id = id * beta + idx + 1;
    return id;
}

} // namespace

struct TreeDirectory::KeyCache {
    mutable std::shared_mutex mu;
    std::unordered_map<std::uint64_t, BitMatrix> children;
};

TreeDirectory::TreeDirectory(TreeDirectory&&) noexcept = default;
TreeDirectory& TreeDirectory::operator=(TreeDirectory&&) noexcept = default;
TreeDirectory::~TreeDirectory() = default;

OpCounts& OpCounts::operator+=(const OpCounts& o) {
    reader_matvec += o.reader_matvec;
    tag_matvec += o.tag_matvec;
    bits_sent += o.bits_sent;
    bits_received += o.bits_received;
    return *this;
}

LevelObservation& LevelObservation::operator+=(const LevelObservation& o) {
    on_path_levels += o.on_path_levels;
    strict_false_events += o.strict_false_events;
    departures += o.departures;
    return *this;
}

std::size_t TagCredential::storage_bits() const {
    std::size_t bits = x_t.size() + y_t.size();
    for (const auto& k : path_keys) bits += k.size();
    return bits;
}

TreeDirectory TreeDirectory::setup_system(std::uint64_t n_bound, const ProtocolParams& params,
                                          SeededStream& stream) {
    params.validate();
    const std::uint64_t cap = params.capacity();
    if (cap < n_bound)
        throw std::invalid_argument("setup_system: beta^d smaller than population bound");

    TreeDirectory dir;
    dir.params_ = params;
    dir.capacity_ = cap;
    std::array<std::uint64_t, 4> raw{};
    stream.fill_words(raw);
    std::memcpy(dir.master_.value.bytes.data(), raw.data(), dir.master_.value.bytes.size());
    dir.cache_ = std::make_unique<KeyCache>();
    dir.use_free_list_ = cap <= kFreeListLimit;
    if (dir.use_free_list_) {
        dir.free_leaves_.resize(cap);
        for (std::uint64_t i = 0; i < cap; ++i) dir.free_leaves_[i] = i;
    }
    return dir;
}

std::vector<std::uint32_t> TreeDirectory::path_of_leaf(std::uint64_t leaf) const {
    if (leaf >= capacity_) throw std::invalid_argument("leaf index out of range");
    std::vector<std::uint32_t> path(params_.d);
    for (std::uint32_t level = params_.d; level-- > 0;) {
        path[level] = static_cast<std::uint32_t>(leaf % params_.beta);
        leaf /= params_.beta;
    }
    return path;
}

std::uint64_t TreeDirectory::leaf_of_path(std::span<const std::uint32_t> path) const {
    if (path.size() != params_.d) throw std::invalid_argument("path depth mismatch");
    std::uint64_t leaf = 0;
    for (std::uint32_t idx : path) {
        if (idx >= params_.beta) throw std::invalid_argument("child index out of range");
        leaf = leaf * params_.beta + idx;
    }
    return leaf;
}

BitVector TreeDirectory::node_key(std::span<const std::uint32_t> path) const {
    if (path.empty() || path.size() > params_.d)
        throw std::invalid_argument("node_key: invalid path depth");
    for (std::uint32_t idx : path)
        if (idx >= params_.beta) throw std::invalid_argument("node_key: child index out of range");
    SeededStream s(derive_seed(master_.value, "node/" + canonical_path(path)));
    return s.uniform_vector(params_.k_y);
}

const BitMatrix& TreeDirectory::children_keys(std::span<const std::uint32_t> parent_path) const {
    if (parent_path.size() >= params_.d)
        throw std::invalid_argument("children_keys: node has no children");
    const std::uint64_t id = node_id(params_.beta, parent_path);
    {
        std::shared_lock lock(cache_->mu);
        auto it = cache_->children.find(id);
        if (it != cache_->children.end()) return it->second;
    }
    BitMatrix keys(params_.beta, params_.k_y);
    std::vector<std::uint32_t> child(parent_path.begin(), parent_path.end());
    child.push_back(0);
    for (std::uint64_t c = 0; c < params_.beta; ++c) {
        child.back() = static_cast<std::uint32_t>(c);
        keys.set_row(c, node_key(child));
    }
    std::unique_lock lock(cache_->mu);
    return cache_->children.emplace(id, std::move(keys)).first->second;
}

HbPlusKeys TreeDirectory::leaf_auth_keys(std::uint64_t leaf) const {
    if (leaf >= capacity_) throw std::invalid_argument("leaf index out of range");
    SeededStream s(derive_seed(master_.value, "leaf", leaf));
    HbPlusKeys keys;
    keys.x = s.uniform_vector(params_.k_x);
    keys.y = s.uniform_vector(params_.k_y);
    return keys;
}

TagCredential TreeDirectory::register_tag(std::uint64_t tag_id, SeededStream& stream) {
    if (leaf_by_tag_.count(tag_id)) throw std::invalid_argument("register_tag: duplicate tag id");
    if (registered_count() >= capacity_) throw std::invalid_argument("register_tag: tree is full");

    std::uint64_t leaf;
    if (use_free_list_) {
        const std::uint64_t pick = stream.uniform_below(free_leaves_.size());
        leaf = free_leaves_[pick];
        free_leaves_[pick] = free_leaves_.back();
        free_leaves_.pop_back();
    } else {
        do {
            leaf = stream.uniform_below(capacity_);
        } while (used_leaves_.count(leaf));
        used_leaves_.insert(leaf);
    }
    leaf_by_tag_.emplace(tag_id, leaf);

    TagCredential cred;
    cred.true_leaf = leaf;
    const auto path = path_of_leaf(leaf);
    cred.path_keys.reserve(params_.d);
    for (std::uint32_t level = 1; level <= params_.d; ++level)
        cred.path_keys.push_back(node_key(std::span(path.data(), level)));
    auto auth = leaf_auth_keys(leaf);
    cred.x_t = std::move(auth.x);
    cred.y_t = std::move(auth.y);
    return cred;
}

std::uint64_t TreeDirectory::leaf_of_tag(std::uint64_t tag_id) const {
    auto it = leaf_by_tag_.find(tag_id);
    if (it == leaf_by_tag_.end()) throw std::invalid_argument("unknown tag id");
    return it->second;
}

DescentResult TreeDirectory::descend(const TraversalMessage& msg,
                                     std::span<const std::uint32_t> true_path,
                                     LevelObservation* obs) const {
    if (msg.z_levels.size() != params_.d)
        throw std::invalid_argument("descend: wrong number of level responses");
    if (msg.b_m.rows() != params_.r || msg.b_m.cols() != params_.k_y)
        throw std::invalid_argument("descend: challenge dimensions mismatch");

    const std::size_t r_tr = params_.r_tr;
    const std::size_t zw = BitVector::word_count_for(r_tr);
    std::vector<std::uint64_t> z_child(zw);

    DescentResult res;
    res.path.reserve(params_.d);
    bool on_true_path = !true_path.empty();

    for (std::uint32_t level = 0; level < params_.d; ++level) {
        const BitVector& z_tag = msg.z_levels[level];
        if (z_tag.size() != r_tr) throw std::invalid_argument("descend: response length mismatch");
        const BitMatrix& children = children_keys(std::span(res.path));

        std::size_t best_dist = r_tr + 1;
        std::uint32_t best_child = 0;
        std::size_t true_dist = 0;
        bool strict_false = false;
        const std::uint32_t true_child = on_true_path ? true_path[level] : 0;

        for (std::uint64_t c = 0; c < params_.beta; ++c) {
            std::fill(z_child.begin(), z_child.end(), 0);
            const auto y_c = children.row(c);
            for (std::size_t i = 0; i < r_tr; ++i)
                if (parity_and(msg.b_m.row(i), y_c))
                    z_child[i / 64] |= std::uint64_t{1} << (i % 64);
            std::size_t dist = 0;
            const auto zt = z_tag.words();
            for (std::size_t w = 0; w < zw; ++w) dist += std::popcount(z_child[w] ^ zt[w]);

            if (dist < best_dist) { // ties keep the lowest child index
                best_dist = dist;
                best_child = static_cast<std::uint32_t>(c);
            }
            if (on_true_path && c == true_child) true_dist = dist;
        }
        if (on_true_path && obs) {
            // strict event: some false sibling strictly closer than the true
            // child (what Eq-style closed forms model); a tie that merely
            // wins the index break is not a strict event.
            strict_false = best_dist < true_dist;
            obs->on_path_levels += 1;
            if (strict_false) obs->strict_false_events += 1;
            if (best_child != true_child) obs->departures += 1;
        }
        if (on_true_path && best_child != true_child) on_true_path = false;
        res.path.push_back(best_child);
    }
    res.leaf = leaf_of_path(res.path);
    return res;
}

TraversalMessage tag_traversal_respond(const TagCredential& cred, const ProtocolParams& params,
                                       SeededStream& stream) {
    if (cred.path_keys.size() != params.d)
        throw std::invalid_argument("traversal: credential depth mismatch");
    TraversalMessage msg;
    msg.b_m = stream.uniform_matrix(params.r, params.k_y);
    msg.z_levels.reserve(params.d);
    for (std::uint32_t level = 0; level < params.d; ++level) {
        BitVector z = mat_vec_mul_top(msg.b_m, params.r_tr, cred.path_keys[level]);
        z ^= stream.bernoulli_vector(params.r_tr, params.eps);
        msg.z_levels.push_back(std::move(z));
    }
    return msg;
}

ProtocolOutcome run_protocol_once(const TreeDirectory& dir, const TagCredential& cred,
                                  const Seed& trial_seed, Transcript* trace,
                                  LevelObservation* obs) {
    const ProtocolParams& p = dir.params();
    SeededStream tag(derive_seed(trial_seed, "tag"));
    SeededStream reader(derive_seed(trial_seed, "reader"));

    TraversalMessage msg = tag_traversal_respond(cred, p, tag);

    std::vector<std::uint32_t> true_path;
    if (obs && cred.true_leaf != kUnregisteredLeaf) true_path = dir.path_of_leaf(cred.true_leaf);
    DescentResult desc = dir.descend(msg, true_path, obs);

    BitMatrix a_m = reader.uniform_matrix(p.r, p.k_x);
    BitVector noise = tag.bernoulli_vector(p.r, p.eps);
    HbPlusKeys tag_keys{cred.x_t, cred.y_t};
    BitVector z = hbplus_tag_respond(a_m, msg.b_m, tag_keys, noise);

    HbPlusKeys leaf_keys = dir.leaf_auth_keys(desc.leaf);
    BitVector expected = hbplus_reader_expected(a_m, msg.b_m, leaf_keys);
    VerifyResult verdict = verify_threshold(z, expected, p.tau);

    ProtocolOutcome out;
    out.identified_leaf = desc.leaf;
    out.accepted = verdict.accepted;
    out.distance = static_cast<std::uint32_t>(verdict.distance);
    out.repeats_used = 1;
    out.path = std::move(desc.path);
    out.ops.reader_matvec = static_cast<std::uint64_t>(p.d) * p.beta + 2;
    out.ops.tag_matvec = p.d + 2;
    out.ops.bits_sent = static_cast<std::uint64_t>(p.r) * p.k_y +
                        static_cast<std::uint64_t>(p.d) * p.r_tr + p.r;
    out.ops.bits_received = static_cast<std::uint64_t>(p.r) * p.k_x;

    if (trace) {
        trace->traversal = std::move(msg);
        trace->a_m = std::move(a_m);
        trace->z = std::move(z);
        trace->identified_leaf = out.identified_leaf;
        trace->distance = out.distance;
        trace->accepted = out.accepted;
    }
    return out;
}

ProtocolOutcome run_protocol_iterated(const TreeDirectory& dir, const TagCredential& cred,
                                      const Seed& trial_seed, LevelObservation* obs) {
    const std::uint32_t s = dir.params().s;
    ProtocolOutcome total;
    for (std::uint32_t rep = 0; rep < s; ++rep) {
        const Seed rep_seed = rep == 0 ? trial_seed : derive_seed(trial_seed, "rep", rep);
        ProtocolOutcome once = run_protocol_once(dir, cred, rep_seed, nullptr, obs);
        total.ops += once.ops;
        total.identified_leaf = once.identified_leaf;
        total.accepted = once.accepted;
        total.distance = once.distance;
        total.path = std::move(once.path);
        total.repeats_used = rep + 1;
        if (total.accepted) break;
    }
    return total;
}

TagCredential make_impostor_credential(const ProtocolParams& params, SeededStream& stream) {
    TagCredential cred;
    cred.path_keys.reserve(params.d);
    for (std::uint32_t i = 0; i < params.d; ++i)
        cred.path_keys.push_back(stream.uniform_vector(params.k_y));
    cred.x_t = stream.uniform_vector(params.k_x);
    cred.y_t = stream.uniform_vector(params.k_y);
    cred.true_leaf = kUnregisteredLeaf;
    return cred;
}

} // namespace hbtree
