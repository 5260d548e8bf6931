#include "armsynth/pareto.hpp"

#include "armsynth/types.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace armsynth {

bool dominates(const ObjectiveVector& u, const ObjectiveVector& v) {
    return u.e_x <= v.e_x && u.e_tau <= v.e_tau && (u.e_x < v.e_x || u.e_tau < v.e_tau);
}

std::vector<int> nondominated_sort(std::span<const ObjectiveVector> points) {
    const auto n = points.size();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const auto& pa = points[static_cast<std::size_t>(a)];
        const auto& pb = points[static_cast<std::size_t>(b)];
        if (pa.e_x != pb.e_x) return pa.e_x < pb.e_x;
        if (pa.e_tau != pb.e_tau) return pa.e_tau < pb.e_tau;
        return a < b;
    });
    // Last (smallest e_tau) member of every front so far. Processing in
    // lexicographic order, a point is dominated by front k iff it is
    // dominated by that member, and the predicate is monotone in k.
    std::vector<int> last;
    std::vector<int> rank(n, 0);
    for (int idx : order) {
        const auto& p = points[static_cast<std::size_t>(idx)];
        std::size_t lo = 0, hi = last.size();
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (dominates(points[static_cast<std::size_t>(last[mid])], p)) lo = mid + 1;
            else hi = mid;
        }
        if (lo == last.size()) last.push_back(idx);
        else last[lo] = idx;
        rank[static_cast<std::size_t>(idx)] = static_cast<int>(lo);
    }
    return rank;
}

std::vector<int> constrained_ranks(std::span<const ObjectiveVector> points) {
    std::vector<ObjectiveVector> feasible, infeasible;
    std::vector<std::size_t> fi, ii;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].feasible) {
            feasible.push_back({points[i].e_x, points[i].e_tau, true, {}});
            fi.push_back(i);
        } else {
            infeasible.push_back({points[i].e_x, points[i].e_tau, false, {}});
            ii.push_back(i);
        }
    }
    std::vector<int> out(points.size(), 0);
    const auto rf = nondominated_sort(feasible);
    int offset = 0;
    for (std::size_t k = 0; k < fi.size(); ++k) {
        out[fi[k]] = rf[k];
        offset = std::max(offset, rf[k] + 1);
    }
    const auto ri = nondominated_sort(infeasible);
    for (std::size_t k = 0; k < ii.size(); ++k) out[ii[k]] = offset + ri[k];
    return out;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> points, std::span<const int> members) {
    const auto m = members.size();
    std::vector<double> dist(m, 0.0);
    if (m <= 2) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        return dist;
    }
    std::vector<std::size_t> order(m);
    for (int objective = 0; objective < 2; ++objective) {
        auto value = [&](std::size_t k) {
            const auto& p = points[static_cast<std::size_t>(members[k])];
            return objective == 0 ? p.e_x : p.e_tau;
        };
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
        const double range = value(order.back()) - value(order.front());
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (!(range > 0.0)) continue;
        for (std::size_t k = 1; k + 1 < m; ++k) dist[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / range;
    }
    return dist;
}

double hypervolume(std::span<const ObjectiveVector> front, const ObjectiveVector& ref) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(front.size());
    for (const auto& p : front) {
        if (!(p.e_x < ref.e_x && p.e_tau < ref.e_tau))
            throw ContractViolation("hypervolume: every point must be strictly below the reference point");
        pts.emplace_back(p.e_x, p.e_tau);
    }
    std::sort(pts.begin(), pts.end());
    double area = 0.0;
    double ceiling = ref.e_tau;
    for (const auto& [x, tau] : pts) {
        if (tau >= ceiling) continue;
        area += (ref.e_x - x) * (ceiling - tau);
        ceiling = tau;
    }
    return area;
}

std::vector<double> hypervolume_contributions(std::span<const ObjectiveVector> points, const ObjectiveVector& ref) {
    const auto n = points.size();
    for (const auto& p : points)
        if (!(p.e_x < ref.e_x && p.e_tau < ref.e_tau))
            throw ContractViolation("hypervolume_contributions: every point must be strictly below the reference point");
    std::vector<double> out(n, 0.0);
    const auto ranks = nondominated_sort(points);
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < n; ++i)
        if (ranks[i] == 0) front.push_back(i);
    // Rank-0 points sorted by e_x have strictly decreasing e_tau, except for
    // exact duplicates, which share their area and so contribute nothing.
    std::sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
        if (points[a].e_x != points[b].e_x) return points[a].e_x < points[b].e_x;
        return a < b;
    });
    for (std::size_t k = 0; k < front.size(); ++k) {
        const auto& p = points[front[k]];
        const bool dup_prev = k > 0 && points[front[k - 1]].e_x == p.e_x && points[front[k - 1]].e_tau == p.e_tau;
        const bool dup_next =
            k + 1 < front.size() && points[front[k + 1]].e_x == p.e_x && points[front[k + 1]].e_tau == p.e_tau;
        if (dup_prev || dup_next) continue;
        const double right = k + 1 < front.size() ? points[front[k + 1]].e_x : ref.e_x;
        const double top = k > 0 ? points[front[k - 1]].e_tau : ref.e_tau;
        // Points dominated by p may still cover part of p's box; that part
        // stays covered when p is removed.
        std::vector<ObjectiveVector> shadowed;
        for (std::size_t i = 0; i < n; ++i)
            if (ranks[i] > 0 && points[i].e_x < right && points[i].e_tau < top) shadowed.push_back(points[i]);
        const ObjectiveVector corner{right, top, true, {}};
        out[front[k]] = (right - p.e_x) * (top - p.e_tau) - (shadowed.empty() ? 0.0 : hypervolume(shadowed, corner));
    }
    return out;
}

bool ParetoArchive::insert(int id, const ObjectiveVector& objectives) {
    if (!objectives.feasible) return false;
    for (const auto& m : members_)
        if (dominates(m.objectives, objectives)) return false;
    std::erase_if(members_, [&](const ArchiveEntry& m) { return dominates(objectives, m.objectives); });
    members_.push_back({id, objectives});
    return true;
}

std::vector<ArchiveEntry> ParetoArchive::sorted() const {
    auto out = members_;
    std::sort(out.begin(), out.end(), [](const ArchiveEntry& a, const ArchiveEntry& b) {
        if (a.objectives.e_x != b.objectives.e_x) return a.objectives.e_x < b.objectives.e_x;
        if (a.objectives.e_tau != b.objectives.e_tau) return a.objectives.e_tau < b.objectives.e_tau;
        return a.id < b.id;
    });
    return out;
}

double ParetoArchive::hypervolume() const {
    if (!reference) return 0.0;
    std::vector<ObjectiveVector> inside;
    for (const auto& m : members_)
        if (m.objectives.e_x < reference->e_x && m.objectives.e_tau < reference->e_tau)
            inside.push_back({m.objectives.e_x, m.objectives.e_tau, true, {}});
    return armsynth::hypervolume(inside, *reference);
}

}  // namespace armsynth
