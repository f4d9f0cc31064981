#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>

namespace mmkit {

/// Size guards for the exact searches. Exceeding a guard raises
/// SizeGuardError instead of silently switching to a heuristic. Every field
/// can be overridden through an MMKIT_GUARD_* environment variable (see
/// Limits::from_env); values are plain integers.
struct Limits {
  std::size_t iso_atoms = 10;                // mm_isomorphic backtracking
  std::size_t prohorov_oracle_atoms = 12;    // 2^n subset enumeration
  std::size_t box_nodes = 30;                // |X|*|Y| clique-graph nodes
  std::size_t box_oracle_denominator = 8;    // D! blow-up bijections
  std::size_t gh_atoms = 12;                 // |K|+|L| for exact gh
  std::size_t domination_source = 14;        // |X| in check_domination
  std::size_t domination_target = 8;         // |Y| in check_domination
  std::uint64_t map_search = 1000000;        // |Y|^|X| cap for eps searches
  std::size_t product_atoms = 4096;          // product space atom count

  static Limits from_env() {
    Limits l;
    read(l.iso_atoms, "MMKIT_GUARD_ISO_ATOMS");
    read(l.prohorov_oracle_atoms, "MMKIT_GUARD_PROHOROV_ORACLE_ATOMS");
    read(l.box_nodes, "MMKIT_GUARD_BOX_NODES");
    read(l.box_oracle_denominator, "MMKIT_GUARD_BOX_ORACLE_DENOMINATOR");
    read(l.gh_atoms, "MMKIT_GUARD_GH_ATOMS");
    read(l.domination_source, "MMKIT_GUARD_DOMINATION_SOURCE");
    read(l.domination_target, "MMKIT_GUARD_DOMINATION_TARGET");
    read(l.map_search, "MMKIT_GUARD_MAP_SEARCH");
    read(l.product_atoms, "MMKIT_GUARD_PRODUCT_ATOMS");
    return l;
  }

 private:
  template <typename T>
  static void read(T& field, const char* name) {
    if (const char* s = std::getenv(name)) {
      const unsigned long long v = std::strtoull(s, nullptr, 10);
      if (v > 0) field = static_cast<T>(v);
    }
  }
};

}  // namespace mmkit
