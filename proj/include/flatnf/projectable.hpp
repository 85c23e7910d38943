#pragma once
#include <string>
#include <vector>

#include "flatnf/diffgeo.hpp"
#include "flatnf/system.hpp"

namespace flatnf {

// Vertical directions of f: fields v on XU with v(f^i) = 0 for every i. Dimension m
// under the standing rank assumptions.
Distribution kernel_distribution(const DiscreteSystem& sys, const Options& opt);

struct ExpressResult {
  bool ok = false;          // differential membership dg in span{df^1..df^n}
  Expr image_expr;          // G over the shifted chart with G o f = g, when ok
};

// Decide whether g(x,u) factors through f and construct the factor. The membership test
// is rank([df; dg]) = n; construction eliminates (x,u) through the relations
// x_i^+ = f^i, with a linear-combination fallback G = N/D over shifted-chart monomials
// (the condition N o f - g * (D o f) = 0 is linear in the coefficients, and density of
// the image of f makes any nonzero solution valid). Throws ExpressionConstructionFailed
// only when the test passed but both constructions fail; the returned factor is always
// re-verified by substitution.
ExpressResult express_in_image(const DiscreteSystem& sys, const Expr& g,
                               const Options& opt);

struct PushResult {
  bool ok = false;
  VectorField image;        // on the shifted chart, when ok
  int failed_component = -1;  // state index whose v(f^i) is not expressible
};

PushResult pushforward(const DiscreteSystem& sys, const VectorField& v,
                       const Options& opt);

struct ProjectableResult {
  Distribution D;       // largest projectable subdistribution of E, basis adapted
  Distribution image;   // f_*(D); basis field j is the pushforward of D's basis field j
  int fixpoint_rounds = 0;
  bool involutive = false;
  std::vector<std::string> audit;
};

// Dual fixpoint: with K the kernel distribution, grow the annihilator of E + K by Lie
// derivatives along K until stable; the annihilated distribution C is the largest
// K-invariant subdistribution of E + K, and D = C intersect E. The returned basis is
// adapted: the first dim(image) fields push forward onto image's basis, the rest lie in
// the kernel. Every generator's pushforward is verified; FixpointFailure otherwise.
// A caller iterating over steps can pass the (step-independent) kernel distribution to
// avoid recomputing it.
ProjectableResult largest_projectable_subdistribution(const DiscreteSystem& sys,
                                                      const Distribution& E,
                                                      const Options& opt,
                                                      const Distribution* kernel = nullptr);

}  // namespace flatnf
