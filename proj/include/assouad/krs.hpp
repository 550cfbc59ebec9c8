#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "assouad/rational.hpp"
#include "assouad/set_models.hpp"

namespace assouad {

struct KrsParams {
  Rational s{1, 9};
  Rational c{3, 8};
  Rational C{9, 8};
  int max_level = 4;
  Resolution resolution{};
  std::size_t max_nodes = 4'000'000;  // refuse to build beyond this many nodes

  void validate() const;
};

enum class ChildClass : std::uint8_t { Root, Boundary, Interior, DistinguishedInterior };
std::string class_name(ChildClass c);

/// One interval I_w of the hierarchy. `hull_lo`/`hull_hi` are the extreme
/// points of E inside the interval; `point` is the distinguished point x_w.
struct KrsNode {
  int parent = -1;
  int first_child = -1;
  int child_count = 0;
  int level = 0;
  int index = 0;  // position among siblings (roots: among roots)
  ChildClass cls = ChildClass::Root;
  Rational left, right;
  Rational hull_lo, hull_hi;
  Rational point;
};

/// Nodes are stored level by level, left to right, so siblings are
/// contiguous and `level_begin[k]..level_begin[k+1]` spans level k.
struct KrsTree {
  enum class Kind : std::uint8_t { Krs, Coding };
  Kind kind = Kind::Krs;
  KrsParams params;
  std::optional<SetDescriptor> set;
  std::vector<KrsNode> nodes;
  std::vector<int> level_begin;

  int depth() const { return static_cast<int>(level_begin.size()) - 2; }
  int level_size(int k) const { return level_begin[k + 1] - level_begin[k]; }
  std::string word(int node) const;
  /// s^k, the scale of level k.
  Rational scale(int k) const;
  bool splits(int node) const { return nodes[node].child_count >= 2; }
};

KrsTree build_tree(const SetDescriptor& desc, const KrsParams& params);

struct PropertyCheck {
  std::string name;
  bool pass = true;
  long checked = 0;
  long failures = 0;
  std::string counterexample;  // word and detail of the first failure
};

struct VerifyReport {
  std::vector<PropertyCheck> checks;
  bool all_pass() const;
  const PropertyCheck& get(const std::string& name) const;
};

/// Exact check of the node invariants on every node (and the adjacency
/// relation on every level).
VerifyReport verify_properties(const KrsTree& tree);

struct PathRecord {
  std::string start_word;
  int start_node = -1;
  int start_level = 0;
  int length = 0;
  int split_count = 0;  // intervals of the path, other than the last, that split
  bool is_boundary_path = false;
  std::vector<int> nodes;  // start node first
};

/// Maximal boundary paths of length >= min_len, sorted by start level then
/// start word.
std::vector<PathRecord> boundary_paths(const KrsTree& tree, int min_len);

struct ZetaEntry {
  int n = 0;
  Rational zeta;
  PathRecord witness;
};

struct ZetaEstimate {
  std::vector<ZetaEntry> per_n;
  Rational zeta_hat;
  int depth_used = 0;
};

/// zeta_n for n = 1..depth/2 by dynamic programming over the tree.
ZetaEstimate zeta_estimate(const KrsTree& tree);
/// The same quantity by explicit path enumeration; exponential, for tests.
Rational zeta_brute_force(const KrsTree& tree, int n);

/// Depth-first text dump, one node per line.
std::string dump_tree(const KrsTree& tree);

}  // namespace assouad
