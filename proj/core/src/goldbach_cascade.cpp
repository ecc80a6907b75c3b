#include "nqlab/goldbach_cascade.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "nqlab/errors.hpp"

namespace nqlab {

std::string to_string(TransitionClass c) {
    switch (c) {
        case TransitionClass::OneBody: return "ONE_BODY";
        case TransitionClass::TwoBodyAssisted: return "TWO_BODY_ASSISTED";
        case TransitionClass::GoldbachViolation: return "GOLDBACH_VIOLATION";
    }
    return "UNKNOWN";
}

bool one_body_allowed(const TwoBodyState& s, const TwoBodyState& t) {
    if (t.w() != s.w() + 2) throw DomainError("one_body_allowed: states must sit on consecutive levels w, w+2");
    auto moved = [](std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
        return c == a + 2 && d == b;  // a -> c moves up, b == d spectator
    };
    return moved(s.p1, s.p2, t.p1, t.p2) || moved(s.p1, s.p2, t.p2, t.p1) || moved(s.p2, s.p1, t.p1, t.p2) ||
           moved(s.p2, s.p1, t.p2, t.p1);
}

const std::vector<TwoBodyState>& CascadeGraph::level(std::uint64_t w) const {
    static const std::vector<TwoBodyState> empty;
    auto it = levels.find(w);
    return it == levels.end() ? empty : it->second;
}

CascadeGraph build_graph(std::uint64_t w_max) {
    if (w_max < 6 || w_max % 2 != 0) throw DomainError("build_graph: w_max must be even and >= 6");
    const PrimeTable table(w_max + 2);
    CascadeGraph g;
    g.w_max = w_max;
    for (std::uint64_t w = 6; w <= w_max; w += 2) {
        auto& lvl = g.levels[w];
        for (auto [p1, p2] : goldbach_partitions(table, w).pairs) lvl.push_back({p1, p2});
    }
    for (std::uint64_t w = 6; w + 2 <= w_max; w += 2) {
        const auto& lo = g.levels[w];
        const auto& hi = g.levels[w + 2];
        bool any = false;
        for (const auto& s : lo) {
            for (const auto& t : hi) {
                if (one_body_allowed(s, t)) {
                    g.one_body_edges.emplace_back(s, t);
                    any = true;
                }
            }
        }
        TransitionClass c = TransitionClass::OneBody;
        if (hi.empty()) c = TransitionClass::GoldbachViolation;
        else if (!any) c = TransitionClass::TwoBodyAssisted;
        g.transitions[w] = c;
    }
    return g;
}

TransitionReport classify_transitions(const CascadeGraph& g) {
    TransitionReport r;
    r.w_max = g.w_max;
    for (auto [w, c] : g.transitions) {
        if (c == TransitionClass::TwoBodyAssisted) r.two_body_assisted.push_back(w);
        if (c == TransitionClass::GoldbachViolation) r.violations.push_back(w);
    }
    r.first_assisted = r.two_body_assisted.empty() ? 0 : r.two_body_assisted.front();

    for (std::uint64_t hi = g.w_max; hi >= 64; hi /= 2) {
        const std::uint64_t lo = hi / 2;
        r.counts_by_octave.push_back(static_cast<std::size_t>(std::count_if(
            r.two_body_assisted.begin(), r.two_body_assisted.end(), [&](std::uint64_t w) { return w >= lo && w < hi; })));
    }
    std::reverse(r.counts_by_octave.begin(), r.counts_by_octave.end());
    r.count_growing = r.counts_by_octave.size() >= 2;
    for (std::size_t i = 1; i < r.counts_by_octave.size(); ++i)
        if (r.counts_by_octave[i] <= r.counts_by_octave[i - 1]) r.count_growing = false;

    const PrimeTable table(g.w_max + 2);
    for (auto [w, c] : g.transitions) {
        if (c == TransitionClass::GoldbachViolation) continue;
        const bool nlt = is_nlt(table, w) == NltStatus::Nlt;
        if (nlt != (c == TransitionClass::TwoBodyAssisted)) r.nlt_mismatches.push_back(w);
    }

    // Reachability from (3,3). A state without a one-body successor (for
    // example (7,7) at w = 14) takes an assisted step to every state of w+2.
    std::set<TwoBodyState> seen;
    std::map<TwoBodyState, std::vector<TwoBodyState>> adj;
    for (const auto& [s, t] : g.one_body_edges) adj[s].push_back(t);
    std::set<std::uint64_t> flooded;
    std::queue<TwoBodyState> q;
    const TwoBodyState start{3, 3};
    q.push(start);
    seen.insert(start);
    while (!q.empty()) {
        const auto s = q.front();
        q.pop();
        std::vector<TwoBodyState> next = adj[s];
        if (next.empty() && s.w() + 2 <= g.w_max && flooded.insert(s.w() + 2).second) next = g.level(s.w() + 2);
        for (const auto& t : next)
            if (seen.insert(t).second) q.push(t);
    }
    r.all_levels_reachable = true;
    for (const auto& [w, states] : g.levels) {
        const bool hit = std::any_of(states.begin(), states.end(), [&](const TwoBodyState& s) { return seen.count(s) > 0; });
        if (!hit) r.all_levels_reachable = false;
    }
    return r;
}

TransitionReport classify_transitions(std::uint64_t w_max) {
    if (w_max < 8) throw DomainError("classify_transitions: w_max must be >= 8");
    return classify_transitions(build_graph(w_max));
}

double coupling_estimate(TransitionClass kind, double one_body_scale, double two_body_scale, double U0) {
    if (one_body_scale < 0 || two_body_scale < 0) throw DomainError("coupling_estimate: scales must be non-negative");
    switch (kind) {
        case TransitionClass::OneBody: return one_body_scale;
        case TransitionClass::TwoBodyAssisted: return one_body_scale * two_body_scale / U0;
        case TransitionClass::GoldbachViolation: return 0.0;
    }
    return 0.0;
}

}  // namespace nqlab
