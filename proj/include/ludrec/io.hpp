#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ludrec/solvers.hpp"
#include "ludrec/view_graph.hpp"

namespace ludrec {

// Plain-text records, one per line, LF terminated:
//
//   n=<n> p=<p> sigma=<sigma> seed=<seed>
//   V <i> <x> <y> <z>                     (ground truth, optional block)
//   E <i> <j> <gx> <gy> <gz> <G|B>
//
// A result file is an instance followed by one block per solver run:
//
//   METHOD <lud|shapefit>
//   R <i> <x> <y> <z>
//   A <i> <j> <alpha>                     (LUD only)
//   OBJ <value> ITERS <k> STATUS <Converged|MaxIters>
//
// Reals are written with 17 significant digits so a write/read cycle is
// exact.

/// Shortest round-trip-safe rendering used by every text output.
std::string FormatReal(double value);

void WriteInstance(std::ostream& out, const Instance& instance);
std::string InstanceToString(const Instance& instance);

/// Throws kParse with the offending line number on malformed input.
Instance ReadInstance(std::istream& in);
Instance ReadInstanceFile(const std::string& path);
void WriteInstanceFile(const std::string& path, const Instance& instance);

struct ResultBlock {
  Method method = Method::kLud;
  SolverResult result;
};

void WriteResultBlock(std::ostream& out, const ViewGraph& graph, const ResultBlock& block);

struct ResultFile {
  Instance instance;
  std::vector<ResultBlock> blocks;
};

ResultFile ReadResultFile(std::istream& in);
ResultFile ReadResultFile(const std::string& path);

}  // namespace ludrec
