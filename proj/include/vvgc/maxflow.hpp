#pragma once

#include <cstdint>
#include <vector>

namespace vvgc {

// Capacitated s-t graph. Each node carries a source link and a sink link;
// edges carry independent capacities in both directions.
struct FlowGraph {
  struct Edge {
    std::uint32_t u = 0, v = 0;
    double capUV = 0, capVU = 0;
  };

  std::vector<double> sourceCap;
  std::vector<double> sinkCap;
  std::vector<Edge> edges;

  explicit FlowGraph(std::size_t nodes = 0) : sourceCap(nodes, 0.0), sinkCap(nodes, 0.0) {}
  std::size_t nodeCount() const { return sourceCap.size(); }
  void addEdge(std::uint32_t u, std::uint32_t v, double capUV, double capVU) { edges.push_back({u, v, capUV, capVU}); }
};

enum class Side : std::uint8_t { Source, Sink };

struct MaxFlowResult {
  double flow = 0;
  std::vector<Side> side;  // Source: reachable from s in the residual graph
};

// Boykov-Kolmogorov augmenting paths on search trees grown from both terminals.
MaxFlowResult maxFlow(const FlowGraph& graph);

}  // namespace vvgc
