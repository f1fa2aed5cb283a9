#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dualmem {

/// Approach indices, clockwise from north.
enum Approach : int { kNorth = 0, kEast = 1, kSouth = 2, kWest = 3 };

/// Discretized view of one intersection: a queue-bin index per approach
/// (N, E, S, W) plus the current phase index.
struct RawState {
    std::array<int, 4> queue_bins{};
    int phase = 0;

    auto operator<=>(const RawState&) const = default;
};

/// A RawState known to be the representative of its equivalence class.
struct CanonicalState {
    RawState value;

    auto operator<=>(const CanonicalState&) const = default;
};

/**
 * One permute-and-relabel symmetry: approaches move to approach_perm[i],
 * phase p is relabeled to phase_map[p]. Acting on states and actions with
 * the same element keeps the dynamics equivalent.
 */
struct GroupElement {
    std::array<int, 4> approach_perm{0, 1, 2, 3};
    std::vector<int> phase_map;

    RawState apply(const RawState& s) const {
        if (s.phase < 0 || s.phase >= static_cast<int>(phase_map.size()))
            throw std::invalid_argument("state phase outside group's phase range");
        RawState out;
        for (int i = 0; i < 4; ++i) {
            out.queue_bins[static_cast<std::size_t>(approach_perm[static_cast<std::size_t>(i)])] =
                s.queue_bins[static_cast<std::size_t>(i)];
        }
        out.phase = phase_map[static_cast<std::size_t>(s.phase)];
        return out;
    }

    bool operator==(const GroupElement&) const = default;
};

/// Action relabeling under a symmetry: acting with remap_action(a, e) in
/// e(s) is dynamically equivalent to acting with a in s.
inline int remap_action(int a, const GroupElement& e) {
    if (a < 0 || a >= static_cast<int>(e.phase_map.size()))
        throw std::invalid_argument("action outside group's phase range");
    return e.phase_map[static_cast<std::size_t>(a)];
}

/**
 * A finite symmetry group over RawState. Construction verifies the group
 * axioms by brute force (identity present, closure, inverses), so a value
 * of this type is always a genuine group.
 */
class SymmetryGroup {
public:
    /// The trivial group; canonicalization under it is the identity map.
    static SymmetryGroup identity(int phase_count) {
        if (phase_count < 1) throw std::invalid_argument("phase_count must be >= 1");
        GroupElement id;
        id.phase_map.resize(static_cast<std::size_t>(phase_count));
        for (int p = 0; p < phase_count; ++p) id.phase_map[static_cast<std::size_t>(p)] = p;
        return SymmetryGroup({id}, phase_count);
    }

    /**
     * The 8 dihedral symmetries of a 4-approach intersection (4 rotations,
     * optionally mirrored) with the matching phase relabeling derived from
     * the served-approach sets. Throws if the phase set is not closed under
     * the symmetries, e.g. a phase serving only N with no phase serving E.
     */
    static SymmetryGroup dihedral(const std::vector<std::vector<int>>& phase_approaches) {
        const int phase_count = static_cast<int>(phase_approaches.size());
        if (phase_count < 1) throw std::invalid_argument("at least one phase required");

        std::vector<std::vector<int>> sorted_phases(phase_approaches);
        for (auto& p : sorted_phases) {
            if (p.empty()) throw std::invalid_argument("phase must serve at least one approach");
            for (int a : p) {
                if (a < 0 || a > 3) throw std::invalid_argument("approach index out of range");
            }
            std::sort(p.begin(), p.end());
            if (std::adjacent_find(p.begin(), p.end()) != p.end())
                throw std::invalid_argument("phase lists an approach twice");
        }
        for (std::size_t i = 0; i < sorted_phases.size(); ++i) {
            for (std::size_t j = i + 1; j < sorted_phases.size(); ++j) {
                if (sorted_phases[i] == sorted_phases[j])
                    throw std::invalid_argument("duplicate phase definition");
            }
        }

        std::vector<GroupElement> elements;
        for (int mirror = 0; mirror < 2; ++mirror) {
            for (int rot = 0; rot < 4; ++rot) {
                GroupElement e;
                for (int i = 0; i < 4; ++i) {
                    int image = i;
                    if (mirror) image = (image == kEast) ? kWest : (image == kWest) ? kEast : image;
                    image = (image + rot) % 4;
                    e.approach_perm[static_cast<std::size_t>(i)] = image;
                }
                e.phase_map.resize(static_cast<std::size_t>(phase_count));
                for (int p = 0; p < phase_count; ++p) {
                    std::vector<int> image;
                    for (int a : sorted_phases[static_cast<std::size_t>(p)]) {
                        image.push_back(e.approach_perm[static_cast<std::size_t>(a)]);
                    }
                    std::sort(image.begin(), image.end());
                    const auto it = std::find(sorted_phases.begin(), sorted_phases.end(), image);
                    if (it == sorted_phases.end())
                        throw std::invalid_argument(
                            "phase set is not closed under the dihedral symmetries");
                    e.phase_map[static_cast<std::size_t>(p)] =
                        static_cast<int>(it - sorted_phases.begin());
                }
                elements.push_back(std::move(e));
            }
        }
        return SymmetryGroup(std::move(elements), phase_count);
    }

    const std::vector<GroupElement>& elements() const { return elements_; }

    const GroupElement& element(std::size_t index) const { return elements_.at(index); }

    /// Inverse of elements()[index], precomputed at construction.
    const GroupElement& inverse(std::size_t index) const {
        return elements_[inverse_index_.at(index)];
    }

    int phase_count() const { return phase_count_; }

    std::size_t size() const { return elements_.size(); }

private:
    SymmetryGroup(std::vector<GroupElement> elements, int phase_count)
        : elements_(std::move(elements)), phase_count_(phase_count) {
        verify_axioms();
    }

    static GroupElement compose(const GroupElement& outer, const GroupElement& inner) {
        GroupElement out;
        for (int i = 0; i < 4; ++i) {
            out.approach_perm[static_cast<std::size_t>(i)] = outer.approach_perm[
                static_cast<std::size_t>(inner.approach_perm[static_cast<std::size_t>(i)])];
        }
        out.phase_map.resize(inner.phase_map.size());
        for (std::size_t p = 0; p < inner.phase_map.size(); ++p) {
            out.phase_map[p] =
                outer.phase_map[static_cast<std::size_t>(inner.phase_map[p])];
        }
        return out;
    }

    void verify_axioms() {
        GroupElement id;
        id.phase_map.resize(static_cast<std::size_t>(phase_count_));
        for (int p = 0; p < phase_count_; ++p) id.phase_map[static_cast<std::size_t>(p)] = p;

        const auto index_of = [&](const GroupElement& e) -> std::size_t {
            const auto it = std::find(elements_.begin(), elements_.end(), e);
            if (it == elements_.end()) throw std::invalid_argument("set is not closed: missing element");
            return static_cast<std::size_t>(it - elements_.begin());
        };

        if (std::find(elements_.begin(), elements_.end(), id) == elements_.end())
            throw std::invalid_argument("group lacks the identity element");

        for (const auto& a : elements_) {
            for (const auto& b : elements_) {
                index_of(compose(a, b));  // closure
            }
        }

        inverse_index_.resize(elements_.size());
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            bool found = false;
            for (std::size_t j = 0; j < elements_.size(); ++j) {
                if (compose(elements_[i], elements_[j]) == id) {
                    inverse_index_[i] = j;
                    found = true;
                    break;
                }
            }
            if (!found) throw std::invalid_argument("element without inverse");
        }
    }

    std::vector<GroupElement> elements_;
    std::vector<std::size_t> inverse_index_;
    int phase_count_;
};

/// The orbit { e(s) : e in g }, deduplicated and sorted.
inline std::vector<RawState> orbit(const RawState& s, const SymmetryGroup& g) {
    std::vector<RawState> out;
    out.reserve(g.size());
    for (const auto& e : g.elements()) out.push_back(e.apply(s));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// A canonical state together with the group element that produced it,
/// canonical = element(s). The element index is the first one (in group
/// order) attaining the minimum, so the frame is deterministic.
struct CanonicalFrame {
    CanonicalState state;
    std::size_t element_index = 0;
};

/// Representative = lexicographic minimum of the orbit under the
/// (queue_bins, phase) tuple order.
inline CanonicalFrame canonicalize_frame(const RawState& s, const SymmetryGroup& g) {
    CanonicalFrame best;
    best.state.value = g.elements().front().apply(s);
    best.element_index = 0;
    for (std::size_t i = 1; i < g.size(); ++i) {
        RawState candidate = g.elements()[i].apply(s);
        if (candidate < best.state.value) {
            best.state.value = candidate;
            best.element_index = i;
        }
    }
    return best;
}

inline CanonicalState canonicalize(const RawState& s, const SymmetryGroup& g) {
    return canonicalize_frame(s, g).state;
}

/// Number of group elements fixing s; 1 means the frame mapping s to its
/// representative is unique.
inline std::size_t stabilizer_size(const RawState& s, const SymmetryGroup& g) {
    std::size_t count = 0;
    for (const auto& e : g.elements()) {
        if (e.apply(s) == s) ++count;
    }
    return count;
}

}  // namespace dualmem
