#pragma once
#include <optional>

#include "flatnf/distribution.hpp"

namespace flatnf {

// [v, w]^i = v(w^i) - w(v^i).
VectorField lie_bracket(const VectorField& v, const VectorField& w);

struct InvolutivityWitness {
  int i, j;  // basis indices whose bracket leaves the span
  VectorField bracket;
};

bool is_involutive(const Distribution& D,
                   std::optional<InvolutivityWitness>* witness = nullptr);

// One-forms vanishing on D; dimension is codim D.
Codistribution annihilator(const Distribution& D);
// Fields annihilated by every form of W; dimension is codim W.
Distribution from_annihilator(const Codistribution& W);

// Cartan formula in coordinates: (L_w omega)_i = w(omega_i) + sum_j omega_j * d w^j / d zeta^i.
OneForm lie_derivative(const VectorField& w, const OneForm& omega);

bool span_equal(const Distribution& A, const Distribution& B);
Distribution sum(const Distribution& A, const Distribution& B);
// Generic-point intersection computed through annihilators:
// ann(A cap B) = ann(A) + ann(B).
Distribution intersect(const Distribution& A, const Distribution& B);

// Lift a distribution living on the shifted-state chart back through the projection
// (x, u) -> x: rename every component to the unshifted state and adjoin all input
// coordinate fields.
Distribution preimage_under_projection(const Distribution& delta, const Chart& xu);

}  // namespace flatnf
