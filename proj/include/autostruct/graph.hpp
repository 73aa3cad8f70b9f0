#ifndef AUTOSTRUCT_GRAPH_HPP
#define AUTOSTRUCT_GRAPH_HPP

#include <cstdint>
#include <vector>

namespace autostruct {

/** \brief Strongly connected components, numbered in reverse topological order.
 *
 * For an edge u -> v in different components, comp[u] > comp[v].
 */
struct Sccs {
    std::vector<std::uint32_t> comp;
    /// Component has a cycle (more than one node, or a self-loop).
    std::vector<bool> cyclic;
    std::uint32_t count = 0;
};

Sccs strongly_connected(const std::vector<std::vector<std::uint32_t>>& adj);

}  // namespace autostruct

#endif
