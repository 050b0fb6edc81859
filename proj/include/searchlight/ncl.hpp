#pragma once

#include "searchlight/rational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace searchlight {

// Constraint-logic machines: 3-regular graphs whose edges carry orientations.
// An AND vertex is satisfied when its designated output edge points at it or
// both of its input edges do; an OR vertex is satisfied when at least one of
// its three incident edges points at it.  A move reverses a single edge while
// keeping every vertex satisfied.

enum class VertexKind { And, Or };

// Orientation of an edge relative to its endpoint order.  Undefined means the
// edge is mid-reversal and points at neither endpoint; it only occurs inside
// asynchronous traces.
enum class Orientation { ToFirst, ToSecond, Undefined };

Orientation reversed(Orientation o);

struct NclVertex {
  VertexKind kind = VertexKind::Or;
  // AND vertices designate one incident edge as the output; -1 elsewhere.
  int output_edge = -1;
};

struct NclEdge {
  // Vertex ids.  -1 marks a free end: a dangling half-edge that belongs to no
  // vertex, so pointing toward it satisfies nobody.  Free ends let small test
  // gadgets exist without closing the graph.
  int first = -1;
  int second = -1;
};

struct NclMachine {
  std::vector<NclVertex> vertices;
  std::vector<NclEdge> edges;
};

// One orientation per edge, indexed like NclMachine::edges.
using Configuration = std::vector<Orientation>;

struct MoveSeq {
  Configuration initial;
  std::vector<int> moves;  // edge ids, applied in order
};

struct TraceEvent {
  int edge = 0;
  Rational start;   // reversal begins: orientation becomes Undefined after this
  Rational finish;  // reversal completes: the flipped orientation holds from here
};

struct AsyncTrace {
  Configuration initial;
  std::vector<TraceEvent> events;
};

struct EdgeTarget {
  int edge = -1;
  Orientation toward = Orientation::ToFirst;  // never Undefined
};

struct EenclInstance {
  NclMachine machine;
  EdgeTarget a;  // the edge whose target orientation may start the game
  EdgeTarget b;  // the edge the solver must eventually orient as targeted
};

// Structural checks; empty result means the machine is well formed.  Planarity
// and connectivity are deliberately not checked: no operation consults them.
std::vector<std::string> validate_machine(const NclMachine& machine);
std::vector<std::string> validate_eencl(const EenclInstance& instance);

// True iff every vertex constraint holds.  Undefined edges count as directed
// toward no vertex.  Throws std::invalid_argument when the configuration does
// not cover every edge.
bool is_legal(const NclMachine& machine, const Configuration& config);

// Edge ids whose single reversal keeps the configuration legal, ascending.
// Throws std::invalid_argument when the configuration is illegal or contains
// Undefined: synchronous play never sees half-reversed edges.
std::vector<int> legal_moves(const NclMachine& machine,
                             const Configuration& config);

struct SolveNclOptions {
  // Exhaustive search visits up to 2^edges configurations; refuse above this.
  int max_edges = 20;
};

// Decides whether some legal configuration with edge a targeted reaches some
// legal configuration with edge b targeted through single-edge reversals.
// Returns the lexicographically smallest witness among the shortest ones
// (ordered by initial configuration, then by the move list), or nullopt when
// no start/goal pair is connected.  Throws std::invalid_argument on malformed
// instances and on machines larger than SolveNclOptions::max_edges.
std::optional<MoveSeq> solve_eencl(const EenclInstance& instance,
                                   const SolveNclOptions& options = {});

struct LegalityReport {
  bool legal = true;
  // Start of the first stretch of time on which a vertex constraint fails.
  // Empty when the trace is legal, or when the initial configuration itself
  // is illegal (the violation predates every event).
  std::optional<Rational> violation_time;
  std::string message;
};

// Simulates the trace over its sorted event boundaries.  Each event makes its
// edge Undefined on the open interval (start, finish) and flips it at finish.
// The trace is legal when every open interval between consecutive boundaries,
// the stretch before the first event, and the final configuration all satisfy
// is_legal.  Throws std::invalid_argument when an event has finish <= start,
// when two phases of one edge overlap, or when the initial configuration has
// Undefined edges.
LegalityReport check_async_trace(const NclMachine& machine,
                                 const AsyncTrace& trace);

// Flattens a legal trace into synchronous play: events sorted by start time
// (stable on ties), each contributing one reversal.  The result replays
// legally and ends in the trace's final configuration.  Throws
// std::invalid_argument when the trace is illegal.
MoveSeq serialize_trace(const NclMachine& machine, const AsyncTrace& trace);

// JSON round-trips.  Machine documents hold "vertices" and "edges"; instance
// documents add distinguished edges "a" and "b" with target orientations.
NclMachine load_machine(const std::string& text);
std::string save_machine(const NclMachine& machine);
NclMachine load_machine_file(const std::string& path);

EenclInstance load_eencl(const std::string& text);
std::string save_eencl(const EenclInstance& instance);
EenclInstance load_eencl_file(const std::string& path);
void save_eencl_file(const EenclInstance& instance, const std::string& path);

AsyncTrace load_trace(const std::string& text);
std::string save_trace(const AsyncTrace& trace);
AsyncTrace load_trace_file(const std::string& path);
void save_trace_file(const AsyncTrace& trace, const std::string& path);

MoveSeq load_move_seq(const std::string& text);
std::string save_move_seq(const MoveSeq& seq);
void save_move_seq_file(const MoveSeq& seq, const std::string& path);

}  // namespace searchlight
