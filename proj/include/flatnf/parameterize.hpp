#pragma once
#include <map>
#include <string>
#include <vector>

#include "flatnf/triangular.hpp"

namespace flatnf {

// Expressions of every original variable in the flat output and its forward shifts.
// Output variables y1, y2 carry shift indices; R[j] bounds the shifts of y_{j+1} needed:
// states use shifts up to R[j]-1, inputs up to R[j]. q is the highest input shift inside
// the output map itself (-1 when the output is a pure state function).
struct Parameterization {
  VarList flat_output_vars;                // final-chart variables chosen as the output
  std::vector<Expr> flat_output_original;  // the same, in original coordinates
  std::map<Var, Expr> Fx;                  // original state -> expression in y shifts
  std::map<Var, Expr> Fu;                  // original input -> expression in y shifts
  std::vector<int> R;
  int q = -1;
};

// Walks the triangular levels top-down, solving each level's update equations for the
// z variables below it, then pulls the final-chart parameterization back through the
// change chain.
Parameterization build_parameterization(const DiscreteSystem& original,
                                        const TriangularForm& tf, const Options& opt);

struct ParamCheck {
  std::string name;
  bool pass;
  std::string detail;
};

// Substitutes the parameterization into the original update equations and the output
// map; both residual families must vanish identically in the free shift variables.
std::vector<ParamCheck> verify_parameterization(const DiscreteSystem& original,
                                                const Parameterization& p);

}  // namespace flatnf
