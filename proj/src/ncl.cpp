#include "searchlight/ncl.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace searchlight {

namespace {

// Does edge e, oriented per config, point at vertex v?
bool inward(const NclMachine& machine, const Configuration& config, int e,
            int v) {
  const NclEdge& edge = machine.edges[static_cast<std::size_t>(e)];
  const Orientation o = config[static_cast<std::size_t>(e)];
  if (o == Orientation::ToFirst) return edge.first == v;
  if (o == Orientation::ToSecond) return edge.second == v;
  return false;  // mid-reversal: directed at nobody
}

// Index of the first vertex whose constraint fails, or -1.
int first_unsatisfied(const NclMachine& machine, const Configuration& config) {
  const int nv = static_cast<int>(machine.vertices.size());
  for (int v = 0; v < nv; ++v) {
    const NclVertex& vx = machine.vertices[static_cast<std::size_t>(v)];
    bool satisfied = false;
    if (vx.kind == VertexKind::And) {
      // Output inward suffices; otherwise every input must point inward.
      satisfied = vx.output_edge >= 0 &&
                  vx.output_edge < static_cast<int>(machine.edges.size()) &&
                  inward(machine, config, vx.output_edge, v);
      if (!satisfied) {
        satisfied = true;
        for (int e = 0; e < static_cast<int>(machine.edges.size()); ++e) {
          if (e == vx.output_edge) continue;
          const NclEdge& edge = machine.edges[static_cast<std::size_t>(e)];
          if (edge.first != v && edge.second != v) continue;
          if (!inward(machine, config, e, v)) {
            satisfied = false;
            break;
          }
        }
      }
    } else {
      for (int e = 0; e < static_cast<int>(machine.edges.size()); ++e) {
        const NclEdge& edge = machine.edges[static_cast<std::size_t>(e)];
        if (edge.first != v && edge.second != v) continue;
        if (inward(machine, config, e, v)) {
          satisfied = true;
          break;
        }
      }
    }
    if (!satisfied) return v;
  }
  return -1;
}

void require_coverage(const NclMachine& machine, const Configuration& config,
                      const char* who) {
  if (config.size() != machine.edges.size()) {
    throw std::invalid_argument(
        std::string(who) + ": configuration covers " +
        std::to_string(config.size()) + " edges but the machine has " +
        std::to_string(machine.edges.size()));
  }
}

std::string join_issues(const std::vector<std::string>& issues) {
  std::string out;
  for (const std::string& s : issues) {
    if (!out.empty()) out += "; ";
    out += s;
  }
  return out;
}

}  // namespace

Orientation reversed(Orientation o) {
  switch (o) {
    case Orientation::ToFirst:
      return Orientation::ToSecond;
    case Orientation::ToSecond:
      return Orientation::ToFirst;
    default:
      return Orientation::Undefined;
  }
}

std::vector<std::string> validate_machine(const NclMachine& machine) {
  std::vector<std::string> issues;
  const int nv = static_cast<int>(machine.vertices.size());
  const int ne = static_cast<int>(machine.edges.size());
  std::vector<int> degree(static_cast<std::size_t>(nv), 0);
  for (int e = 0; e < ne; ++e) {
    const NclEdge& edge = machine.edges[static_cast<std::size_t>(e)];
    for (const int end : {edge.first, edge.second}) {
      if (end < -1 || end >= nv) {
        issues.push_back("edge " + std::to_string(e) + " references vertex " +
                         std::to_string(end) + " which does not exist");
      } else if (end >= 0) {
        ++degree[static_cast<std::size_t>(end)];
      }
    }
    if (edge.first == -1 && edge.second == -1) {
      issues.push_back("edge " + std::to_string(e) + " has two free ends");
    }
    if (edge.first != -1 && edge.first == edge.second) {
      issues.push_back("edge " + std::to_string(e) + " is a self loop");
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (degree[static_cast<std::size_t>(v)] != 3) {
      issues.push_back("vertex " + std::to_string(v) + " has degree " +
                       std::to_string(degree[static_cast<std::size_t>(v)]) +
                       ", expected 3");
    }
    const NclVertex& vx = machine.vertices[static_cast<std::size_t>(v)];
    if (vx.kind == VertexKind::And) {
      if (vx.output_edge < 0 || vx.output_edge >= ne) {
        issues.push_back("AND vertex " + std::to_string(v) +
                         " lacks a valid output edge");
      } else {
        const NclEdge& out =
            machine.edges[static_cast<std::size_t>(vx.output_edge)];
        if (out.first != v && out.second != v) {
          issues.push_back("output edge of AND vertex " + std::to_string(v) +
                           " is not incident to it");
        }
      }
    } else if (vx.output_edge != -1) {
      issues.push_back("OR vertex " + std::to_string(v) +
                       " designates an output edge");
    }
  }
  return issues;
}

std::vector<std::string> validate_eencl(const EenclInstance& instance) {
  std::vector<std::string> issues = validate_machine(instance.machine);
  const int ne = static_cast<int>(instance.machine.edges.size());
  const auto check = [&](const EdgeTarget& t, const char* name) {
    if (t.edge < 0 || t.edge >= ne) {
      issues.push_back(std::string("distinguished edge ") + name +
                       " is out of range");
    }
    if (t.toward == Orientation::Undefined) {
      issues.push_back(std::string("target orientation of edge ") + name +
                       " is undefined");
    }
  };
  check(instance.a, "a");
  check(instance.b, "b");
  if (instance.a.edge == instance.b.edge) {
    issues.push_back("distinguished edges a and b coincide");
  }
  return issues;
}

bool is_legal(const NclMachine& machine, const Configuration& config) {
  require_coverage(machine, config, "is_legal");
  return first_unsatisfied(machine, config) == -1;
}

std::vector<int> legal_moves(const NclMachine& machine,
                             const Configuration& config) {
  require_coverage(machine, config, "legal_moves");
  for (const Orientation o : config) {
    if (o == Orientation::Undefined) {
      throw std::invalid_argument(
          "legal_moves: configuration has an undefined edge");
    }
  }
  if (first_unsatisfied(machine, config) != -1) {
    throw std::invalid_argument("legal_moves: configuration is illegal");
  }
  std::vector<int> moves;
  Configuration probe = config;
  for (int e = 0; e < static_cast<int>(machine.edges.size()); ++e) {
    probe[static_cast<std::size_t>(e)] =
        reversed(probe[static_cast<std::size_t>(e)]);
    if (first_unsatisfied(machine, probe) == -1) moves.push_back(e);
    probe[static_cast<std::size_t>(e)] = config[static_cast<std::size_t>(e)];
  }
  return moves;
}

std::optional<MoveSeq> solve_eencl(const EenclInstance& instance,
                                   const SolveNclOptions& options) {
  {
    const std::vector<std::string> issues = validate_eencl(instance);
    if (!issues.empty()) {
      throw std::invalid_argument("solve_eencl: " + join_issues(issues));
    }
  }
  const NclMachine& machine = instance.machine;
  const int n = static_cast<int>(machine.edges.size());
  if (n > options.max_edges) {
    throw std::invalid_argument(
        "solve_eencl: machine has " + std::to_string(n) +
        " edges; exhaustive search is capped at " +
        std::to_string(options.max_edges) +
        " (raise SolveNclOptions::max_edges to override)");
  }
  if (n > 30) {
    throw std::invalid_argument(
        "solve_eencl: more than 30 edges cannot be enumerated");
  }

  // Bit e of a mask is 0 for ToFirst, 1 for ToSecond; masks enumerate the
  // whole configuration space, so ascending mask order is the lexicographic
  // order on configurations.
  struct Incidence {
    int edge;
    std::uint32_t inward_bit;  // bit value under which the edge points inward
  };
  struct VertexEval {
    VertexKind kind;
    int output = -1;
    std::vector<Incidence> inc;
  };
  std::vector<VertexEval> eval;
  eval.reserve(machine.vertices.size());
  for (int v = 0; v < static_cast<int>(machine.vertices.size()); ++v) {
    VertexEval ve;
    ve.kind = machine.vertices[static_cast<std::size_t>(v)].kind;
    ve.output = machine.vertices[static_cast<std::size_t>(v)].output_edge;
    for (int e = 0; e < n; ++e) {
      const NclEdge& edge = machine.edges[static_cast<std::size_t>(e)];
      if (edge.first == v) ve.inc.push_back({e, 0u});
      if (edge.second == v) ve.inc.push_back({e, 1u});
    }
    eval.push_back(std::move(ve));
  }
  const auto mask_legal = [&](std::uint32_t mask) {
    for (const VertexEval& ve : eval) {
      const auto edge_in = [&](const Incidence& i) {
        return ((mask >> i.edge) & 1u) == i.inward_bit;
      };
      bool ok = false;
      if (ve.kind == VertexKind::And) {
        bool inputs = true;
        for (const Incidence& i : ve.inc) {
          if (i.edge == ve.output) {
            if (edge_in(i)) ok = true;
          } else if (!edge_in(i)) {
            inputs = false;
          }
        }
        ok = ok || inputs;
      } else {
        for (const Incidence& i : ve.inc) {
          if (edge_in(i)) {
            ok = true;
            break;
          }
        }
      }
      if (!ok) return false;
    }
    return true;
  };

  const std::uint32_t total = 1u << n;
  const auto targeted = [&](std::uint32_t mask, const EdgeTarget& t) {
    const std::uint32_t want = t.toward == Orientation::ToSecond ? 1u : 0u;
    return ((mask >> t.edge) & 1u) == want;
  };

  std::vector<bool> legal(total);
  for (std::uint32_t m = 0; m < total; ++m) legal[m] = mask_legal(m);

  // Breadth-first from every goal at once; reversing an edge is its own
  // inverse, so distances read the same in either direction.
  std::vector<std::int32_t> dist(total, -1);
  std::deque<std::uint32_t> queue;
  for (std::uint32_t m = 0; m < total; ++m) {
    if (legal[m] && targeted(m, instance.b)) {
      dist[m] = 0;
      queue.push_back(m);
    }
  }
  while (!queue.empty()) {
    const std::uint32_t m = queue.front();
    queue.pop_front();
    for (int e = 0; e < n; ++e) {
      const std::uint32_t next = m ^ (1u << e);
      if (!legal[next] || dist[next] != -1) continue;
      dist[next] = dist[m] + 1;
      queue.push_back(next);
    }
  }

  std::int32_t best = -1;
  std::uint32_t start = 0;
  for (std::uint32_t m = 0; m < total; ++m) {
    if (!legal[m] || !targeted(m, instance.a) || dist[m] == -1) continue;
    if (best == -1 || dist[m] < best) {
      best = dist[m];
      start = m;
    }
  }
  if (best == -1) return std::nullopt;

  MoveSeq seq;
  seq.initial.resize(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    seq.initial[static_cast<std::size_t>(e)] = ((start >> e) & 1u)
                                                   ? Orientation::ToSecond
                                                   : Orientation::ToFirst;
  }
  std::uint32_t cur = start;
  while (dist[cur] > 0) {
    for (int e = 0; e < n; ++e) {
      const std::uint32_t next = cur ^ (1u << e);
      if (legal[next] && dist[next] == dist[cur] - 1) {
        seq.moves.push_back(e);
        cur = next;
        break;
      }
    }
  }
  return seq;
}

LegalityReport check_async_trace(const NclMachine& machine,
                                 const AsyncTrace& trace) {
  require_coverage(machine, trace.initial, "check_async_trace");
  for (const Orientation o : trace.initial) {
    if (o == Orientation::Undefined) {
      throw std::invalid_argument(
          "check_async_trace: initial configuration has an undefined edge");
    }
  }
  const int ne = static_cast<int>(machine.edges.size());
  for (std::size_t i = 0; i < trace.events.size(); ++i) {
    const TraceEvent& ev = trace.events[i];
    if (ev.edge < 0 || ev.edge >= ne) {
      throw std::invalid_argument("check_async_trace: event " +
                                  std::to_string(i) + " names edge " +
                                  std::to_string(ev.edge) +
                                  " outside the machine");
    }
    if (!(ev.finish > ev.start)) {
      throw std::invalid_argument("check_async_trace: event " +
                                  std::to_string(i) +
                                  " finishes at or before its start");
    }
  }
  {
    // Phases of one edge may touch (one ends exactly when the next begins)
    // but never overlap on an open interval.
    std::vector<std::vector<std::pair<Rational, Rational>>> phases(
        static_cast<std::size_t>(ne));
    for (const TraceEvent& ev : trace.events) {
      phases[static_cast<std::size_t>(ev.edge)].push_back(
          {ev.start, ev.finish});
    }
    for (int e = 0; e < ne; ++e) {
      auto& ph = phases[static_cast<std::size_t>(e)];
      std::sort(ph.begin(), ph.end());
      for (std::size_t i = 1; i < ph.size(); ++i) {
        if (ph[i - 1].second > ph[i].first) {
          throw std::invalid_argument("check_async_trace: edge " +
                                      std::to_string(e) +
                                      " has overlapping reversal phases");
        }
      }
    }
  }

  LegalityReport report;
  if (trace.events.empty()) {
    const int v = first_unsatisfied(machine, trace.initial);
    if (v != -1) {
      report.legal = false;
      report.message =
          "the initial configuration violates vertex " + std::to_string(v);
    } else {
      report.message = "legal";
    }
    return report;
  }

  std::vector<Rational> bounds;
  bounds.reserve(trace.events.size() * 2);
  for (const TraceEvent& ev : trace.events) {
    bounds.push_back(ev.start);
    bounds.push_back(ev.finish);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  // Orientations only change at boundaries, so one probe time per stretch
  // reproduces the configuration exactly.
  const auto config_at = [&](const Rational& u) {
    Configuration c = trace.initial;
    for (const TraceEvent& ev : trace.events) {
      const std::size_t e = static_cast<std::size_t>(ev.edge);
      if (ev.finish <= u) {
        c[e] = reversed(c[e]);
      } else if (ev.start < u) {
        c[e] = Orientation::Undefined;
      }
    }
    return c;
  };

  struct Stretch {
    Rational probe;
    std::optional<Rational> onset;  // boundary where the stretch begins
    std::string label;
  };
  std::vector<Stretch> stretches;
  stretches.push_back(
      {bounds.front() - 1, std::nullopt, "the initial configuration"});
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    stretches.push_back({midpoint(bounds[i], bounds[i + 1]), bounds[i],
                         "the open interval (" + format_rational(bounds[i]) +
                             ", " + format_rational(bounds[i + 1]) + ")"});
  }
  stretches.push_back(
      {bounds.back() + 1, bounds.back(), "the final configuration"});

  for (const Stretch& st : stretches) {
    const Configuration c = config_at(st.probe);
    const int v = first_unsatisfied(machine, c);
    if (v != -1) {
      report.legal = false;
      report.violation_time = st.onset;
      report.message =
          "vertex " + std::to_string(v) + " is unsatisfied on " + st.label;
      return report;
    }
  }
  report.message = "legal";
  return report;
}

MoveSeq serialize_trace(const NclMachine& machine, const AsyncTrace& trace) {
  const LegalityReport report = check_async_trace(machine, trace);
  if (!report.legal) {
    throw std::invalid_argument("serialize_trace: trace is illegal: " +
                                report.message);
  }
  std::vector<std::size_t> order(trace.events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return trace.events[a].start < trace.events[b].start;
                   });
  MoveSeq seq;
  seq.initial = trace.initial;
  seq.moves.reserve(order.size());
  for (const std::size_t i : order) seq.moves.push_back(trace.events[i].edge);
  return seq;
}

}  // namespace searchlight
