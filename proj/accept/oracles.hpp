#pragma once
// Independent oracles for the acceptance gate. Everything here recomputes the
// quantity under test by a different route (dense linear algebra, closed
// forms, exact rational arithmetic, brute-force quantifier evaluation, plain
// integer interval arithmetic) and deliberately avoids the library code paths
// it is used to certify.

#include <array>
#include <cstdint>
#include <vector>

#include "rwre/env.hpp"
#include "rwre/geometry.hpp"
#include "rwre/oned.hpp"

namespace rwre::accept {

// Absorption probabilities (hit left before right) for every site of the
// chain, by the Thomas tridiagonal algorithm on the full linear system.
std::vector<double> tridiag_absorption(const BirthDeathChain& chain);

// Homogeneous gambler's ruin on [0, n] started at m: probability of hitting 0
// before n, closed form in the ratio (1-alpha)/alpha.
double closed_form_ruin(double alpha, std::int64_t n, std::int64_t m);

// Probability of exiting the box anywhere but its forward face, by dense
// value iteration over the box contents (no walk simulation).
double dp_nonplus_exit(const EnvView& env, const BoxSpec& box, const Point& start,
                       double tol = 1e-13, std::int64_t max_sweeps = 2000000);

// Axis-aligned integer box with pre-scaled integer bounds (half-open).
// axes = number of used dimensions (1 or 2 here).
struct IBox {
    int axes = 1;
    std::array<std::int64_t, 2> lo{};
    std::array<std::int64_t, 2> hi{};
};

bool iboxes_disjoint(const IBox& a, const IBox& b);

// Literal recursive rule: Good iff some child y exists such that every child
// whose exit box is disjoint from y's is Good.
bool literal_good(const std::vector<IBox>& exit_boxes, const std::vector<char>& bad);

// The pairwise gloss: Good iff no two disjoint children are both Bad.
bool pairwise_good(const std::vector<IBox>& exit_boxes, const std::vector<char>& bad);

std::int64_t disjoint_pairs(const std::vector<IBox>& exit_boxes);

// d=1 child anchors of the scale-k parent at the origin (all integer
// arithmetic): multiples y of L_{k-1} whose open inner box stays inside the
// parent exit box [-L_k, L_k + L_k/11).
std::vector<std::int64_t> cover_anchors_1d(std::int64_t L0, std::int64_t N0, int k);

// Child exit boxes, scaled by 11 on the walk axis so the 1/11 fraction is an
// exact integer: [11(a - L), 11a + 12L).
std::vector<IBox> exit_boxes_1d(const std::vector<std::int64_t>& anchors, std::int64_t L_child);

// d=2 version: walk axis scaled by 11, lateral axis scaled by 2 (the lateral
// halfwidth is c*Ltilde with c = 1/2, so 2*c*Ltilde is an integer).
// Lateral exit-box bounds: [2b - lat2, 2b + 4*lat2) with lat2 = 2*c*Ltilde_child.
std::vector<IBox> exit_boxes_2d(const std::vector<std::array<std::int64_t, 2>>& anchors,
                                std::int64_t L_child, std::int64_t lat2_child);

// Exact-rational identity checks for the constant sequences (A5).
bool lambda2_matches_exact(int d, std::int64_t N0, std::int64_t Ntilde0, double lambda2,
                           double rel_tol);
// c_quenched[k] * L_k / c0 must equal (N0/4)^k; verified in exact rationals
// against the double sequence to the given relative tolerance for k <= k_upto.
bool quenched_ladder_matches_exact(std::int64_t L0, std::int64_t N0,
                                   const std::vector<double>& c_quenched, double c0, int k_upto,
                                   double rel_tol);

}  // namespace rwre::accept
