#include "vvgc/maxflow.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "vvgc/core.hpp"

namespace vvgc {
namespace {

constexpr int kNone = -1;
constexpr int kTerminal = -2;
constexpr int kOrphan = -3;
constexpr int kInfDist = std::numeric_limits<int>::max();

struct Arc {
  int head;
  int next;
  double rcap;
};

struct Node {
  int first = kNone;
  int parent = kNone;
  int ts = 0;
  int dist = 0;
  bool isSink = false;
  bool active = false;
  double trcap = 0;
};

class BkSolver {
public:
  explicit BkSolver(const FlowGraph& g) : nodes_(g.nodeCount()) {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const double s = g.sourceCap[i], t = g.sinkCap[i];
      if (!(s >= 0) || !(t >= 0)) throw Error(ErrorKind::BadInput, "negative or NaN terminal capacity");
      flow_ += std::min(s, t);
      nodes_[i].trcap = s - t;
    }
    arcs_.reserve(2 * g.edges.size());
    for (const auto& e : g.edges) {
      if (!(e.capUV >= 0) || !(e.capVU >= 0)) throw Error(ErrorKind::BadInput, "negative or NaN edge capacity");
      if (e.u >= nodes_.size() || e.v >= nodes_.size()) throw Error(ErrorKind::BadInput, "edge endpoint out of range");
      if (e.u == e.v) continue;
      // Arcs 2k and 2k+1 are sisters.
      arcs_.push_back({static_cast<int>(e.v), nodes_[e.u].first, e.capUV});
      nodes_[e.u].first = static_cast<int>(arcs_.size()) - 1;
      arcs_.push_back({static_cast<int>(e.u), nodes_[e.v].first, e.capVU});
      nodes_[e.v].first = static_cast<int>(arcs_.size()) - 1;
    }
  }

  MaxFlowResult solve() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      Node& n = nodes_[i];
      if (n.trcap != 0) {
        n.isSink = n.trcap < 0;
        n.parent = kTerminal;
        n.ts = 0;
        n.dist = 1;
        setActive(static_cast<int>(i));
      }
    }

    int current = kNone;
    while (true) {
      int i = kNone;
      if (current != kNone && nodes_[current].parent != kNone) i = current;
      if (i == kNone && (i = nextActive()) == kNone) break;

      int found = kNone;
      Node& ni = nodes_[i];
      if (!ni.isSink) {
        for (int a = ni.first; a != kNone; a = arcs_[a].next) {
          if (arcs_[a].rcap <= 0) continue;
          const int j = arcs_[a].head;
          Node& nj = nodes_[j];
          if (nj.parent == kNone) {
            nj.isSink = false;
            nj.parent = sister(a);
            nj.ts = ni.ts;
            nj.dist = ni.dist + 1;
            setActive(j);
          } else if (nj.isSink) {
            found = a;
            break;
          } else if (nj.ts <= ni.ts && nj.dist > ni.dist) {
            nj.parent = sister(a);
            nj.ts = ni.ts;
            nj.dist = ni.dist + 1;
          }
        }
      } else {
        for (int a = ni.first; a != kNone; a = arcs_[a].next) {
          if (arcs_[sister(a)].rcap <= 0) continue;
          const int j = arcs_[a].head;
          Node& nj = nodes_[j];
          if (nj.parent == kNone) {
            nj.isSink = true;
            nj.parent = sister(a);
            nj.ts = ni.ts;
            nj.dist = ni.dist + 1;
            setActive(j);
          } else if (!nj.isSink) {
            found = sister(a);
            break;
          } else if (nj.ts <= ni.ts && nj.dist > ni.dist) {
            nj.parent = sister(a);
            nj.ts = ni.ts;
            nj.dist = ni.dist + 1;
          }
        }
      }

      ++time_;
      if (found != kNone) {
        current = i;
        augment(found);
        while (!orphans_.empty()) {
          const int o = orphans_.front();
          orphans_.pop_front();
          if (nodes_[o].isSink) processSinkOrphan(o);
          else processSourceOrphan(o);
        }
      } else {
        current = kNone;
      }
    }
    return {flow_, sourceSide()};
  }

private:
  static int sister(int a) { return a ^ 1; }
  int tail(int a) const { return arcs_[sister(a)].head; }

  void setActive(int i) {
    if (!nodes_[i].active) {
      nodes_[i].active = true;
      active_.push_back(i);
    }
  }

  int nextActive() {
    while (!active_.empty()) {
      const int i = active_.front();
      active_.pop_front();
      nodes_[i].active = false;
      if (nodes_[i].parent != kNone) return i;
    }
    return kNone;
  }

  void orphanFront(int i) {
    nodes_[i].parent = kOrphan;
    orphans_.push_front(i);
  }
  void orphanRear(int i) {
    nodes_[i].parent = kOrphan;
    orphans_.push_back(i);
  }

  // `mid` runs from a source-tree node to a sink-tree node.
  void augment(int mid) {
    double b = arcs_[mid].rcap;
    int i = tail(mid);
    for (int p; (p = nodes_[i].parent) != kTerminal; i = arcs_[p].head) b = std::min(b, arcs_[sister(p)].rcap);
    b = std::min(b, nodes_[i].trcap);
    i = arcs_[mid].head;
    for (int p; (p = nodes_[i].parent) != kTerminal; i = arcs_[p].head) b = std::min(b, arcs_[p].rcap);
    b = std::min(b, -nodes_[i].trcap);

    arcs_[sister(mid)].rcap += b;
    arcs_[mid].rcap -= b;
    i = tail(mid);
    for (int p; (p = nodes_[i].parent) != kTerminal;) {
      arcs_[p].rcap += b;
      arcs_[sister(p)].rcap -= b;
      const int up = arcs_[p].head;
      if (arcs_[sister(p)].rcap == 0) orphanFront(i);
      i = up;
    }
    nodes_[i].trcap -= b;
    if (nodes_[i].trcap == 0) orphanFront(i);

    i = arcs_[mid].head;
    for (int p; (p = nodes_[i].parent) != kTerminal;) {
      arcs_[sister(p)].rcap += b;
      arcs_[p].rcap -= b;
      const int up = arcs_[p].head;
      if (arcs_[p].rcap == 0) orphanFront(i);
      i = up;
    }
    nodes_[i].trcap += b;
    if (nodes_[i].trcap == 0) orphanFront(i);
    flow_ += b;
  }

  // Distance from j to its terminal, or kInfDist when j hangs off an orphan.
  int originDistance(int j) {
    int d = 0;
    for (int k = j;;) {
      if (nodes_[k].ts == time_) return d + nodes_[k].dist;
      const int a = nodes_[k].parent;
      ++d;
      if (a == kTerminal) {
        nodes_[k].ts = time_;
        nodes_[k].dist = 1;
        return d;
      }
      if (a == kOrphan || a == kNone) return kInfDist;
      k = arcs_[a].head;
    }
  }

  void markPath(int j, int d) {
    for (int k = j; nodes_[k].ts != time_; k = arcs_[nodes_[k].parent].head) {
      nodes_[k].ts = time_;
      nodes_[k].dist = d--;
    }
  }

  void processSourceOrphan(int i) { processOrphan(i, false); }
  void processSinkOrphan(int i) { processOrphan(i, true); }

  void processOrphan(int i, bool sinkTree) {
    int best = kNone, bestDist = kInfDist;
    for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
      // A parent must be able to feed i (source tree) or drain it (sink tree).
      const double cap = sinkTree ? arcs_[a].rcap : arcs_[sister(a)].rcap;
      if (cap <= 0) continue;
      const int j = arcs_[a].head;
      if (nodes_[j].isSink != sinkTree || nodes_[j].parent == kNone) continue;
      const int d = originDistance(j);
      if (d == kInfDist) continue;
      if (d < bestDist) best = a, bestDist = d;
      markPath(j, d);
    }
    if (best != kNone) {
      nodes_[i].parent = best;
      nodes_[i].ts = time_;
      nodes_[i].dist = bestDist + 1;
      return;
    }
    nodes_[i].parent = kNone;
    for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next) {
      const int j = arcs_[a].head;
      Node& nj = nodes_[j];
      if (nj.isSink != sinkTree || nj.parent == kNone) continue;
      const double cap = sinkTree ? arcs_[a].rcap : arcs_[sister(a)].rcap;
      if (cap > 0) setActive(j);
      if (nj.parent != kTerminal && nj.parent != kOrphan && arcs_[nj.parent].head == i) orphanRear(j);
    }
  }

  std::vector<Side> sourceSide() const {
    std::vector<Side> side(nodes_.size(), Side::Sink);
    std::vector<int> stack;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].trcap > 0) {
        side[i] = Side::Source;
        stack.push_back(static_cast<int>(i));
      }
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      for (int a = nodes_[i].first; a != kNone; a = arcs_[a].next)
        if (arcs_[a].rcap > 0 && side[arcs_[a].head] == Side::Sink) {
          side[arcs_[a].head] = Side::Source;
          stack.push_back(arcs_[a].head);
        }
    }
    return side;
  }

  std::vector<Node> nodes_;
  std::vector<Arc> arcs_;
  std::deque<int> active_;
  std::deque<int> orphans_;
  int time_ = 0;
  double flow_ = 0;
};

}  // namespace

MaxFlowResult maxFlow(const FlowGraph& graph) { return BkSolver(graph).solve(); }

}  // namespace vvgc
