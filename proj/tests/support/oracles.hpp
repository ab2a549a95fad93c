#ifndef CGFORGE_TESTS_ORACLES_HPP
#define CGFORGE_TESTS_ORACLES_HPP

// Reference computations that share no code path with the library routines
// they check.

#include <vector>

#include "cgforge/dataset.hpp"
#include "cgforge/graph.hpp"

namespace cgforge::testing {

// d-separation by enumerating every simple undirected path from x to y and
// testing each for blocking.
bool brute_force_d_separated(const Dag& g, NodeId x, NodeId y, const NodeSet& z);

// {v != t : t and v are d-connected given (mb \ {v})} where mb is taken from
// the graphical definition; and {v : not d-separated given candidate}.
NodeSet brute_force_markov_blanket(const Dag& g, NodeId t);

// BIC from row-wise tallies in a std::map, accumulated in long double.
long double reference_local_bic(const Dataset& d, NodeId child, const std::vector<NodeId>& parents);
long double reference_total_bic(const Dataset& d, const Dag& g);

// Every labeled DAG over n nodes, by brute force over all 2^(n(n-1)) edge subsets.
std::vector<Dag> all_dags(std::size_t n);

}  // namespace cgforge::testing

#endif
