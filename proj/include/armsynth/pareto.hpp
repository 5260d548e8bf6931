#pragma once

#include "armsynth/objectives.hpp"

#include <optional>
#include <span>
#include <vector>

namespace armsynth {

/// u <= v in (e_x, e_tau) with at least one strict inequality.
bool dominates(const ObjectiveVector& u, const ObjectiveVector& v);

/// Nondomination rank of every point (0 = nondominated). Exact O(n log n)
/// sweep for the bi-objective case.
std::vector<int> nondominated_sort(std::span<const ObjectiveVector> points);

/// Ranks with feasible points ahead of all infeasible ones: feasible points
/// are sorted among themselves, infeasible ones follow starting at the next
/// free rank.
std::vector<int> constrained_ranks(std::span<const ObjectiveVector> points);

/// NSGA-II crowding distance of `members` (indices into `points`), computed
/// within that subset. Boundary members get +infinity.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> points, std::span<const int> members);

/// Area dominated by `front` and bounded by `ref`. Throws ContractViolation
/// when a point is not strictly below `ref` in both objectives. Dominated
/// points in `front` are allowed and contribute nothing.
double hypervolume(std::span<const ObjectiveVector> front, const ObjectiveVector& ref);

/// Exclusive hypervolume contribution of every point w.r.t. `ref`: the area
/// lost when that point alone is removed. Dominated and duplicated points
/// contribute 0. Points must be strictly below `ref`.
std::vector<double> hypervolume_contributions(std::span<const ObjectiveVector> points, const ObjectiveVector& ref);

struct ArchiveEntry {
    int id{0};
    ObjectiveVector objectives;
};

/// Nondominated feasible trials. Members with identical objectives are all
/// kept since neither dominates the other.
class ParetoArchive {
public:
    /// Returns true when the entry was admitted. Infeasible entries are ignored.
    bool insert(int id, const ObjectiveVector& objectives);

    const std::vector<ArchiveEntry>& members() const { return members_; }
    bool empty() const { return members_.empty(); }
    std::size_t size() const { return members_.size(); }

    /// Members sorted by e_x ascending (ties by e_tau, then id).
    std::vector<ArchiveEntry> sorted() const;

    std::optional<ObjectiveVector> reference;

    /// Hypervolume of the members strictly inside `reference`; 0 without one.
    double hypervolume() const;

private:
    std::vector<ArchiveEntry> members_;
};

}  // namespace armsynth
