#pragma once
#include <vector>

#include "flatnf/zpartition.hpp"

namespace flatnf {

// The partitioned system in triangular form: level-k updates depend only on the top
// block and z_{kbar-1}..z_{k-1}, every lower block is covered by the z's above it, and
// each level's update has full generic rank in its z_{k-1} arguments.
struct TriangularForm {
  DiscreteSystem system;             // final coordinates
  std::vector<CoordChange> changes;  // full chain from the original system
  std::vector<ZStep> steps;
  std::vector<VarList> blocks;       // xhat blocks, final names
  std::vector<VarList> z;            // z_0..z_{kbar-1}, final names
  bool redundancy_eliminated = false;
  int redundancy_level = -1;         // level whose single update defines the replacement
  VarList flat_output;               // final-chart variables, set once dim matches m
};

// Checks the dependency, containment, and rank structure; StructureViolation names the
// offending equation or variable.
void verify_triangular(const TriangularForm& tf, const Options& opt);

// Bundles the straightening and partition artifacts and verifies the structure. The flat
// output is filled in right away when the top block already has input dimension.
TriangularForm assemble_triangular(const StraightenResult& st, const ZPartitionResult& zp,
                                   const Options& opt);

// For two-input systems with a one-dimensional top block: exactly one level k has a
// single update fed by a two-dimensional z_{k-1}. Replacing one z_{k-1} component by
// that update value makes the subsystem from level k upwards independent of the other
// component, and (top block, kept component) becomes the flat output. A no-op when the
// top block is two-dimensional or the update already is the component.
TriangularForm eliminate_redundant_input(const TriangularForm& tf, const Options& opt);

// The flat output pulled back through the change chain into original coordinates.
std::vector<Expr> flat_output_in_original(const TriangularForm& tf);

}  // namespace flatnf
