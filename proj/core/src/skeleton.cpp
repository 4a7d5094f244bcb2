// Copyright 2026 The roadex Authors
// SPDX-License-Identifier: Apache-2.0

#include "roadex/skeleton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "roadex/errors.hpp"

namespace roadex {
namespace {

// Neighbour offsets in Zhang-Suen order P2..P9: N, NE, E, SE, S, SW, W, NW.
constexpr std::array<int, 8> kDx{0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy{-1, -1, 0, 1, 1, 1, 0, -1};

// Binary image with a one-pixel zero frame so neighbour reads never branch.
class Mask {
 public:
  explicit Mask(const Raster& r) : w_(r.width()), h_(r.height()), bits_((w_ + 2) * (h_ + 2), 0) {
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) set(x, y, r.at(x, y) != 0.0);
    }
  }

  int width() const { return w_; }
  int height() const { return h_; }
  bool get(int x, int y) const { return bits_[idx(x, y)] != 0; }
  void set(int x, int y, bool v) { bits_[idx(x, y)] = v ? 1 : 0; }

  std::array<std::uint8_t, 8> ring(int x, int y) const {
    std::array<std::uint8_t, 8> n{};
    for (int k = 0; k < 8; ++k) n[k] = bits_[idx(x + kDx[k], y + kDy[k])];
    return n;
  }

  Raster to_raster(const Georef& g) const {
    Raster r(g);
    for (int y = 0; y < h_; ++y) {
      for (int x = 0; x < w_; ++x) r.at(x, y) = get(x, y) ? 1.0 : 0.0;
    }
    return r;
  }

 private:
  std::size_t idx(int x, int y) const {
    return static_cast<std::size_t>(y + 1) * static_cast<std::size_t>(w_ + 2) + static_cast<std::size_t>(x + 1);
  }

  int w_;
  int h_;
  std::vector<std::uint8_t> bits_;
};

int count(const std::array<std::uint8_t, 8>& n) { return n[0] + n[1] + n[2] + n[3] + n[4] + n[5] + n[6] + n[7]; }

// 0 -> 1 transitions around the ring.
int transitions(const std::array<std::uint8_t, 8>& n) {
  int a = 0;
  for (int k = 0; k < 8; ++k) a += (n[k] == 0 && n[(k + 1) % 8] == 1) ? 1 : 0;
  return a;
}

// Yokoi connectivity number for 8-connected foreground. A pixel is simple
// (deletable without changing topology) iff this equals 1.
int yokoi8(const std::array<std::uint8_t, 8>& n) {
  int c = 0;
  for (int k = 0; k < 8; k += 2) {
    const int a = 1 - n[k];
    const int b = 1 - n[(k + 1) % 8];
    const int d = 1 - n[(k + 2) % 8];
    c += a - a * b * d;
  }
  return c;
}

bool deletable(const Mask& m, int x, int y) {
  const auto n = m.ring(x, y);
  return count(n) >= 2 && yokoi8(n) == 1;
}

bool adjacent(Pixel a, Pixel b) { return a != b && std::abs(a.x - b.x) <= 1 && std::abs(a.y - b.y) <= 1; }

std::size_t offset(const Georef& g, Pixel p) {
  return static_cast<std::size_t>(p.y) * static_cast<std::size_t>(g.width) + static_cast<std::size_t>(p.x);
}

Pixel centre_of(const std::vector<Pixel>& pixels) {
  double mx = 0.0, my = 0.0;
  for (Pixel p : pixels) {
    mx += p.x;
    my += p.y;
  }
  mx /= static_cast<double>(pixels.size());
  my /= static_cast<double>(pixels.size());
  Pixel best = pixels.front();
  double best_d = 1e300;
  for (Pixel p : pixels) {
    const double d = (p.x - mx) * (p.x - mx) + (p.y - my) * (p.y - my);
    if (d < best_d || (d == best_d && std::tie(p.y, p.x) < std::tie(best.y, best.x))) {
      best = p;
      best_d = d;
    }
  }
  return best;
}

// Labels 8-connected components of pixels accepted by `member`, in raster
// order. Returns the component count.
template <typename Member>
int label_components(int w, int h, Member&& member, std::vector<int>& labels) {
  labels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), -1);
  int next = 0;
  std::vector<Pixel> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
      if (labels[i] >= 0 || !member(x, y)) continue;
      labels[i] = next;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int k = 0; k < 8; ++k) {
          const int nx = p.x + kDx[k], ny = p.y + kDy[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t j = static_cast<std::size_t>(ny) * static_cast<std::size_t>(w) + static_cast<std::size_t>(nx);
          if (labels[j] >= 0 || !member(nx, ny)) continue;
          labels[j] = next;
          stack.push_back({nx, ny});
        }
      }
      ++next;
    }
  }
  return next;
}

void draw_line(Raster& r, Pixel a, Pixel b) {
  int x = a.x, y = a.y;
  const int dx = std::abs(b.x - a.x), dy = -std::abs(b.y - a.y);
  const int sx = a.x < b.x ? 1 : -1, sy = a.y < b.y ? 1 : -1;
  int err = dx + dy;
  while (true) {
    r.at(x, y) = 1.0;
    if (x == b.x && y == b.y) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y += sy;
    }
  }
}

}  // namespace

void validate(const SkeletonParams& params) {
  if (!(params.max_bridge_gap > 0.0)) throw ParameterError("max_bridge_gap must be positive");
  if (params.min_branch_len == 0) throw ParameterError("min_branch_len must be positive");
}

Raster thin(const Raster& binary) {
  Mask m(binary);
  const int w = m.width(), h = m.height();
  std::vector<Pixel> marked;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int pass = 0; pass < 2; ++pass) {
      marked.clear();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!m.get(x, y)) continue;
          const auto n = m.ring(x, y);
          const int b = count(n);
          if (b < 2 || b > 6 || transitions(n) != 1) continue;
          // n[0]=N, n[2]=E, n[4]=S, n[6]=W
          const bool ok = pass == 0 ? (n[0] * n[2] * n[4] == 0 && n[2] * n[4] * n[6] == 0)
                                    : (n[0] * n[2] * n[6] == 0 && n[0] * n[4] * n[6] == 0);
          if (ok) marked.push_back({x, y});
        }
      }
      for (Pixel p : marked) {
        // Parallel Zhang-Suen deletion can erase 2-pixel-thick diagonals and
        // 2x2 blocks outright; deleting one pixel at a time only while it
        // stays simple keeps the topology.
        if (deletable(m, p.x, p.y)) {
          m.set(p.x, p.y, false);
          changed = true;
        }
      }
    }
  }
  changed = true;
  while (changed) {
    changed = false;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (m.get(x, y) && deletable(m, x, y)) {
          m.set(x, y, false);
          changed = true;
        }
      }
    }
  }
  return m.to_raster(binary.georef());
}

std::size_t count_components(const Raster& binary) {
  std::vector<int> labels;
  return static_cast<std::size_t>(
      label_components(binary.width(), binary.height(), [&](int x, int y) { return binary.at(x, y) != 0.0; }, labels));
}

int neighbor_count(const Raster& binary, int x, int y) {
  int c = 0;
  for (int k = 0; k < 8; ++k) c += binary.get(x + kDx[k], y + kDy[k]) != 0.0 ? 1 : 0;
  return c;
}

std::size_t SkeletonGraph::endpoint_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const SkeletonNode& n) { return n.kind == NodeKind::endpoint; }));
}

std::size_t SkeletonGraph::junction_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const SkeletonNode& n) { return n.kind == NodeKind::junction; }));
}

std::size_t SkeletonGraph::pixel_count() const {
  std::size_t n = 0;
  for (const auto& node : nodes) n += node.pixels.size();
  for (const auto& b : branches) n += b.interior.size();
  return n;
}

std::size_t SkeletonGraph::component_count() const { return count_components(to_raster()); }

Raster SkeletonGraph::to_raster() const {
  Raster r(georef);
  for (const auto& node : nodes) {
    for (Pixel p : node.pixels) r.at(p) = 1.0;
  }
  for (const auto& b : branches) {
    for (Pixel p : b.interior) r.at(p) = 1.0;
  }
  return r;
}

std::vector<Pixel> SkeletonGraph::path(const SkeletonBranch& branch) const {
  if (branch.closed()) return branch.interior;
  const auto attach = [&](int node, Pixel towards) {
    for (Pixel p : nodes[static_cast<std::size_t>(node)].pixels) {
      if (adjacent(p, towards)) return p;
    }
    return nodes[static_cast<std::size_t>(node)].centre;
  };
  std::vector<Pixel> out;
  if (branch.interior.empty()) {
    // Two nodes touching directly; at least one is a single pixel.
    const auto& a = nodes[static_cast<std::size_t>(branch.from)];
    const auto& b = nodes[static_cast<std::size_t>(branch.to)];
    if (a.pixels.size() == 1) {
      out = {a.pixels.front(), attach(branch.to, a.pixels.front())};
    } else {
      out = {attach(branch.from, b.pixels.front()), b.pixels.front()};
    }
    return out;
  }
  out.reserve(branch.interior.size() + 2);
  out.push_back(attach(branch.from, branch.interior.front()));
  out.insert(out.end(), branch.interior.begin(), branch.interior.end());
  out.push_back(attach(branch.to, branch.interior.back()));
  return out;
}

std::size_t SkeletonGraph::length(const SkeletonBranch& branch) const {
  std::size_t n = branch.interior.size();
  if (branch.closed()) return n;
  for (int end : {branch.from, branch.to}) {
    if (nodes[static_cast<std::size_t>(end)].kind != NodeKind::junction) ++n;
  }
  // Both ends on the same single pixel would count it twice.
  if (branch.from == branch.to && nodes[static_cast<std::size_t>(branch.from)].kind != NodeKind::junction) --n;
  return n;
}

SkeletonGraph build_graph(const Raster& skeleton) {
  const Georef& g = skeleton.georef();
  const int w = skeleton.width(), h = skeleton.height();
  const auto fg = [&](int x, int y) { return skeleton.get(x, y) != 0.0; };

  for (int y = 0; y + 1 < h; ++y) {
    for (int x = 0; x + 1 < w; ++x) {
      if (fg(x, y) && fg(x + 1, y) && fg(x, y + 1) && fg(x + 1, y + 1)) {
        throw ParameterError("raster is not thinned (2x2 block at column " + std::to_string(x) + ", row " +
                             std::to_string(y) + "); run thin() first");
      }
    }
  }

  std::vector<int> deg(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (fg(x, y)) deg[offset(g, {x, y})] = neighbor_count(skeleton, x, y);
    }
  }
  const auto degree = [&](Pixel p) { return deg[offset(g, p)]; };

  SkeletonGraph graph;
  graph.georef = g;
  std::vector<int> node_of(deg.size(), -1);

  std::vector<int> junction_label;
  label_components(w, h, [&](int x, int y) { return fg(x, y) && deg[offset(g, {x, y})] >= 3; }, junction_label);
  std::vector<int> cluster_node;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Pixel p{x, y};
      if (!fg(x, y) || degree(p) == 2) continue;
      const std::size_t i = offset(g, p);
      if (degree(p) >= 3) {
        const auto label = static_cast<std::size_t>(junction_label[i]);
        if (label >= cluster_node.size()) cluster_node.resize(label + 1, -1);
        if (cluster_node[label] < 0) {
          cluster_node[label] = static_cast<int>(graph.nodes.size());
          graph.nodes.push_back({NodeKind::junction, {}, p, 0});
        }
        node_of[i] = cluster_node[label];
        graph.nodes[static_cast<std::size_t>(node_of[i])].pixels.push_back(p);
      } else {
        node_of[i] = static_cast<int>(graph.nodes.size());
        graph.nodes.push_back({degree(p) == 0 ? NodeKind::isolated : NodeKind::endpoint, {p}, p, 0});
      }
    }
  }
  for (auto& node : graph.nodes) node.centre = centre_of(node.pixels);

  std::vector<char> visited(deg.size(), 0);
  const auto other_neighbor = [&](Pixel cur, Pixel prev) {
    for (int k = 0; k < 8; ++k) {
      const Pixel q{cur.x + kDx[k], cur.y + kDy[k]};
      if (q != prev && fg(q.x, q.y)) return q;
    }
    return prev;
  };

  for (std::size_t n = 0; n < graph.nodes.size(); ++n) {
    const auto pixels = graph.nodes[n].pixels;
    for (Pixel p : pixels) {
      for (int k = 0; k < 8; ++k) {
        const Pixel q{p.x + kDx[k], p.y + kDy[k]};
        if (!fg(q.x, q.y)) continue;
        const int qn = node_of[offset(g, q)];
        if (qn >= 0) {
          if (qn > static_cast<int>(n)) graph.branches.push_back({static_cast<int>(n), qn, {}});
          continue;
        }
        if (visited[offset(g, q)]) continue;
        SkeletonBranch b;
        b.from = static_cast<int>(n);
        Pixel prev = p, cur = q;
        while (true) {
          visited[offset(g, cur)] = 1;
          b.interior.push_back(cur);
          const Pixel next = other_neighbor(cur, prev);
          const int nn = node_of[offset(g, next)];
          if (nn >= 0) {
            b.to = nn;
            break;
          }
          if (visited[offset(g, next)]) {
            b.to = b.from;  // unreachable on a thinned raster
            break;
          }
          prev = cur;
          cur = next;
        }
        graph.branches.push_back(std::move(b));
      }
    }
  }

  // Whatever degree-2 pixels remain form node-free loops.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Pixel s{x, y};
      if (!fg(x, y) || node_of[offset(g, s)] >= 0 || visited[offset(g, s)]) continue;
      SkeletonBranch b;
      Pixel prev = s;
      Pixel cur = s;
      do {
        visited[offset(g, cur)] = 1;
        b.interior.push_back(cur);
        const Pixel next = other_neighbor(cur, prev);
        prev = cur;
        cur = next;
      } while (cur != s && !visited[offset(g, cur)]);
      graph.branches.push_back(std::move(b));
    }
  }

  for (const auto& b : graph.branches) {
    if (b.closed()) continue;
    ++graph.nodes[static_cast<std::size_t>(b.from)].degree;
    ++graph.nodes[static_cast<std::size_t>(b.to)].degree;
  }
  return graph;
}

std::vector<Pixel> junction_pixels(const Raster& skeleton) {
  std::vector<Pixel> out;
  for (int y = 0; y < skeleton.height(); ++y) {
    for (int x = 0; x < skeleton.width(); ++x) {
      if (skeleton.at(x, y) != 0.0 && neighbor_count(skeleton, x, y) >= 3) out.push_back({x, y});
    }
  }
  return out;
}

std::vector<Pixel> detect_junctions(const Raster& skeleton) {
  const int w = skeleton.width(), h = skeleton.height();
  std::vector<int> labels;
  const int n = label_components(
      w, h, [&](int x, int y) { return skeleton.at(x, y) != 0.0 && neighbor_count(skeleton, x, y) >= 3; }, labels);
  std::vector<std::vector<Pixel>> clusters(static_cast<std::size_t>(n));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int l = labels[offset(skeleton.georef(), {x, y})];
      if (l >= 0) clusters[static_cast<std::size_t>(l)].push_back({x, y});
    }
  }
  std::vector<Pixel> out;
  for (const auto& c : clusters) out.push_back(centre_of(c));
  std::sort(out.begin(), out.end(), [](Pixel a, Pixel b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
  return out;
}

SkeletonGraph bridge_endpoints(const SkeletonGraph& graph, double max_gap) {
  if (!(max_gap > 0.0)) return graph;
  Raster r = graph.to_raster();
  std::vector<int> comp;
  label_components(r.width(), r.height(), [&](int x, int y) { return r.at(x, y) != 0.0; }, comp);

  std::vector<Pixel> ends;
  for (const auto& node : graph.nodes) {
    if (node.kind != NodeKind::junction) ends.push_back(node.centre);
  }
  struct Candidate {
    double dist;
    std::size_t a, b;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      if (comp[offset(graph.georef, ends[i])] == comp[offset(graph.georef, ends[j])]) continue;
      const double d = std::hypot(ends[i].x - ends[j].x, ends[i].y - ends[j].y);
      if (d <= max_gap) candidates.push_back({d, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& l, const Candidate& r) { return std::tie(l.dist, l.a, l.b) < std::tie(r.dist, r.a, r.b); });

  std::vector<char> used(ends.size(), 0);
  bool drawn = false;
  for (const auto& c : candidates) {
    if (used[c.a] || used[c.b]) continue;
    used[c.a] = used[c.b] = 1;
    draw_line(r, ends[c.a], ends[c.b]);
    drawn = true;
  }
  if (!drawn) return graph;
  return build_graph(thin(r));
}

SkeletonGraph prune_branches(const SkeletonGraph& graph, std::size_t min_len) {
  SkeletonGraph g = graph;
  while (true) {
    Raster r = g.to_raster();
    bool removed = false;
    for (const auto& node : g.nodes) {
      if (node.kind == NodeKind::isolated && node.pixels.size() < min_len) {
        r.at(node.centre) = 0.0;
        removed = true;
      }
    }
    const SkeletonBranch* shortest_spur = nullptr;
    for (const auto& b : g.branches) {
      if (b.closed()) continue;
      const auto& from = g.nodes[static_cast<std::size_t>(b.from)];
      const auto& to = g.nodes[static_cast<std::size_t>(b.to)];
      const bool from_end = from.kind == NodeKind::endpoint;
      const bool to_end = to.kind == NodeKind::endpoint;
      if (!from_end && !to_end) continue;
      const std::size_t len = g.length(b);
      if (len >= min_len) continue;
      if (from_end && to_end) {
        for (Pixel p : b.interior) r.at(p) = 0.0;
        r.at(from.centre) = 0.0;
        r.at(to.centre) = 0.0;
        removed = true;
      } else if (!shortest_spur || len < g.length(*shortest_spur)) {
        shortest_spur = &b;
      }
    }
    if (shortest_spur) {
      for (Pixel p : shortest_spur->interior) r.at(p) = 0.0;
      for (int end : {shortest_spur->from, shortest_spur->to}) {
        const auto& node = g.nodes[static_cast<std::size_t>(end)];
        if (node.kind == NodeKind::endpoint) r.at(node.centre) = 0.0;
      }
      removed = true;
    }
    if (!removed) return g;
    g = build_graph(thin(r));
  }
}

SkeletonGraph clean_skeleton(const SkeletonGraph& graph, const SkeletonParams& params) {
  validate(params);
  return prune_branches(bridge_endpoints(prune_branches(graph, params.min_branch_len), params.max_bridge_gap),
                        params.min_branch_len);
}

SkeletonGraph extend_endpoints(const SkeletonGraph& graph, const Raster& mask, std::size_t lookback) {
  if (lookback == 0) return graph;
  if (mask.width() != graph.georef.width || mask.height() != graph.georef.height) {
    throw ParameterError("mask and skeleton sizes differ");
  }
  const Raster original = graph.to_raster();
  Raster r = original;
  bool grown = false;
  for (const auto& b : graph.branches) {
    if (b.closed()) continue;
    auto path = graph.path(b);
    const std::set<Pixel> own(path.begin(), path.end());
    const auto other = [&](int x, int y) {
      return original.in_bounds(x, y) && original.at(x, y) != 0.0 && !own.count(Pixel{x, y});
    };
    for (int side = 0; side < 2; ++side) {
      if (side == 1) std::reverse(path.begin(), path.end());
      const int end = side == 0 ? b.to : b.from;
      if (graph.nodes[static_cast<std::size_t>(end)].kind != NodeKind::endpoint) continue;
      // path.back() is the endpoint. Thinning bends the last stretch towards a
      // corner of the blob, so that stretch is dropped and regrown along the
      // direction of the stretch before it.
      const std::size_t n = path.size();
      const std::size_t trim = n > 2 * lookback + 1 ? lookback : 0;
      const Pixel tip = path[n - 1 - trim];
      const Pixel back = path[n - 1 - trim - std::min(lookback, n - 1 - trim)];
      const double dx = tip.x - back.x, dy = tip.y - back.y;
      const double len = std::hypot(dx, dy);
      if (len == 0.0) continue;
      for (std::size_t i = n - trim; i < n; ++i) r.at(path[i]) = 0.0;
      Pixel last = tip;
      for (double t = 0.5;; t += 0.5) {
        const Pixel p{static_cast<int>(std::lround(tip.x + t * dx / len)),
                      static_cast<int>(std::lround(tip.y + t * dy / len))};
        if (p == last) continue;
        if (!mask.in_bounds(p.x, p.y) || mask.at(p) == 0.0 || other(p.x, p.y)) break;
        r.at(p) = 1.0;
        grown = true;
        last = p;
        bool touching = false;
        for (int k = 0; k < 8; ++k) touching = touching || other(p.x + kDx[k], p.y + kDy[k]);
        if (touching) break;
      }
    }
  }
  if (!grown) return graph;
  return build_graph(thin(r));
}

SkeletonGraph skeleton_graph(const Raster& binary, const SkeletonParams& params) {
  return extend_endpoints(clean_skeleton(build_graph(thin(binary)), params), binary, params.end_lookback);
}

std::string to_json(const SkeletonGraph& graph) {
  using nlohmann::json;
  const auto kind_name = [](NodeKind k) {
    switch (k) {
      case NodeKind::isolated: return "isolated";
      case NodeKind::endpoint: return "endpoint";
      case NodeKind::junction: return "junction";
    }
    return "unknown";
  };
  json nodes = json::array();
  for (const auto& n : graph.nodes) {
    json pixels = json::array();
    for (Pixel p : n.pixels) pixels.push_back({p.x, p.y});
    nodes.push_back({{"kind", kind_name(n.kind)}, {"x", n.centre.x}, {"y", n.centre.y}, {"degree", n.degree},
                     {"pixels", pixels}});
  }
  json branches = json::array();
  for (const auto& b : graph.branches) {
    json pixels = json::array();
    for (Pixel p : graph.path(b)) pixels.push_back({p.x, p.y});
    branches.push_back({{"from", b.from}, {"to", b.to}, {"closed", b.closed()}, {"pixels", pixels}});
  }
  return json{{"width", graph.georef.width}, {"height", graph.georef.height}, {"nodes", nodes}, {"branches", branches}}
      .dump(2);
}

}  // namespace roadex
