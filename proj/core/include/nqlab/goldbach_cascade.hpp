#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nqlab/numtheory.hpp"

namespace nqlab {

struct TwoBodyState {
    std::uint64_t p1 = 0, p2 = 0;  // odd primes, p1 <= p2
    std::uint64_t w() const { return p1 + p2; }
    bool operator==(const TwoBodyState&) const = default;
    auto operator<=>(const TwoBodyState&) const = default;
};

enum class TransitionClass { OneBody, TwoBodyAssisted, GoldbachViolation };
std::string to_string(TransitionClass c);

// Selection rule for w -> w + 2: exactly one particle moves up by 2, the
// other stays put (pairs compared unordered).
bool one_body_allowed(const TwoBodyState& s, const TwoBodyState& t);

struct CascadeGraph {
    std::uint64_t w_max = 0;
    std::map<std::uint64_t, std::vector<TwoBodyState>> levels;  // even w -> states
    std::vector<std::pair<TwoBodyState, TwoBodyState>> one_body_edges;
    std::map<std::uint64_t, TransitionClass> transitions;  // keyed by the lower level w of w -> w+2

    const std::vector<TwoBodyState>& level(std::uint64_t w) const;
};

// Levels for 6 <= w <= w_max and one-body edges between consecutive levels;
// transitions are classified for every w with w + 2 <= w_max.
CascadeGraph build_graph(std::uint64_t w_max);

struct TransitionReport {
    std::uint64_t w_max = 0;
    std::vector<std::uint64_t> two_body_assisted;  // lower level w of each assisted step
    std::vector<std::uint64_t> violations;
    std::uint64_t first_assisted = 0;
    // Assisted-step counts in successive halves [w_max/2^{k+1}, w_max/2^k); a
    // growing sequence is the empirical stand-in for "unbounded".
    std::vector<std::size_t> counts_by_octave;
    bool count_growing = false;
    std::vector<std::uint64_t> nlt_mismatches;  // w where is_nlt(w) != (class == assisted)
    bool all_levels_reachable = false;
};

TransitionReport classify_transitions(std::uint64_t w_max);
TransitionReport classify_transitions(const CascadeGraph& graph);

double coupling_estimate(TransitionClass kind, double one_body_scale, double two_body_scale, double U0 = 1.0);

}  // namespace nqlab
