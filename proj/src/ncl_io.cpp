#include "searchlight/ncl.hpp"

#include "json_util.hpp"

#include <fstream>
#include <sstream>

namespace searchlight {

namespace {

using jsonio::json;

std::string orientation_name(Orientation o) {
  switch (o) {
    case Orientation::ToFirst:
      return "first";
    case Orientation::ToSecond:
      return "second";
    default:
      return "undefined";
  }
}

Orientation orientation_from(const json& j, const std::string& where) {
  const std::string s = jsonio::get_string(j, where);
  if (s == "first") return Orientation::ToFirst;
  if (s == "second") return Orientation::ToSecond;
  if (s == "undefined") return Orientation::Undefined;
  jsonio::fail(where, "expected 'first', 'second' or 'undefined', got '" + s +
                          "'");
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) jsonio::fail(where, "expected an integer");
  return j.get<int>();
}

NclMachine machine_from_json(const json& j) {
  NclMachine machine;
  const json& vertices = jsonio::field(j, "vertices", "machine");
  if (!vertices.is_array()) jsonio::fail("vertices", "expected an array");
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    const std::string where = "vertices[" + std::to_string(i) + "]";
    const json& vj = vertices[i];
    NclVertex v;
    const std::string kind =
        jsonio::get_string(jsonio::field(vj, "kind", where), where + ".kind");
    if (kind == "and") {
      v.kind = VertexKind::And;
      v.output_edge =
          get_int(jsonio::field(vj, "output", where), where + ".output");
    } else if (kind == "or") {
      v.kind = VertexKind::Or;
    } else {
      jsonio::fail(where + ".kind", "expected 'and' or 'or', got '" + kind +
                                        "'");
    }
    machine.vertices.push_back(v);
  }
  const json& edges = jsonio::field(j, "edges", "machine");
  if (!edges.is_array()) jsonio::fail("edges", "expected an array");
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string where = "edges[" + std::to_string(i) + "]";
    const json& ej = edges[i];
    if (!ej.is_array() || ej.size() != 2) {
      jsonio::fail(where, "expected a [u, v] vertex pair");
    }
    machine.edges.push_back({get_int(ej[0], where + "[0]"),
                             get_int(ej[1], where + "[1]")});
  }
  return machine;
}

json machine_to_json(const NclMachine& machine) {
  json j;
  j["vertices"] = json::array();
  for (const NclVertex& v : machine.vertices) {
    json vj;
    if (v.kind == VertexKind::And) {
      vj["kind"] = "and";
      vj["output"] = v.output_edge;
    } else {
      vj["kind"] = "or";
    }
    j["vertices"].push_back(std::move(vj));
  }
  j["edges"] = json::array();
  for (const NclEdge& e : machine.edges) {
    j["edges"].push_back(json::array({e.first, e.second}));
  }
  return j;
}

EdgeTarget target_from_json(const json& j, const std::string& where) {
  EdgeTarget t;
  t.edge = get_int(jsonio::field(j, "edge", where), where + ".edge");
  t.toward =
      orientation_from(jsonio::field(j, "toward", where), where + ".toward");
  if (t.toward == Orientation::Undefined) {
    jsonio::fail(where + ".toward", "a target orientation cannot be undefined");
  }
  return t;
}

json target_to_json(const EdgeTarget& t) {
  return json{{"edge", t.edge}, {"toward", orientation_name(t.toward)}};
}

Configuration config_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) jsonio::fail(where, "expected an array of orientations");
  Configuration c;
  for (std::size_t i = 0; i < j.size(); ++i) {
    c.push_back(orientation_from(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return c;
}

json config_to_json(const Configuration& c) {
  json j = json::array();
  for (const Orientation o : c) j.push_back(orientation_name(o));
  return j;
}

}  // namespace

NclMachine load_machine(const std::string& text) {
  return machine_from_json(jsonio::parse_document(text, "machine"));
}

std::string save_machine(const NclMachine& machine) {
  return machine_to_json(machine).dump(2) + "\n";
}

NclMachine load_machine_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open machine file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_machine(buf.str());
}

EenclInstance load_eencl(const std::string& text) {
  const json j = jsonio::parse_document(text, "instance");
  EenclInstance out;
  out.machine = machine_from_json(j);
  out.a = target_from_json(jsonio::field(j, "a", "instance"), "a");
  out.b = target_from_json(jsonio::field(j, "b", "instance"), "b");
  return out;
}

std::string save_eencl(const EenclInstance& instance) {
  json j = machine_to_json(instance.machine);
  j["a"] = target_to_json(instance.a);
  j["b"] = target_to_json(instance.b);
  return j.dump(2) + "\n";
}

EenclInstance load_eencl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_eencl(buf.str());
}

void save_eencl_file(const EenclInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << save_eencl(instance);
}

AsyncTrace load_trace(const std::string& text) {
  const json j = jsonio::parse_document(text, "trace");
  AsyncTrace out;
  out.initial =
      config_from_json(jsonio::field(j, "initial", "trace"), "initial");
  const json& events = jsonio::field(j, "events", "trace");
  if (!events.is_array()) jsonio::fail("events", "expected an array");
  for (std::size_t i = 0; i < events.size(); ++i) {
    const std::string where = "events[" + std::to_string(i) + "]";
    const json& ej = events[i];
    TraceEvent ev;
    ev.edge = get_int(jsonio::field(ej, "edge", where), where + ".edge");
    ev.start =
        jsonio::get_rational(jsonio::field(ej, "start", where), where + ".start");
    ev.finish = jsonio::get_rational(jsonio::field(ej, "finish", where),
                                     where + ".finish");
    out.events.push_back(std::move(ev));
  }
  return out;
}

std::string save_trace(const AsyncTrace& trace) {
  json j;
  j["initial"] = config_to_json(trace.initial);
  j["events"] = json::array();
  for (const TraceEvent& ev : trace.events) {
    j["events"].push_back(json{{"edge", ev.edge},
                               {"start", format_rational(ev.start)},
                               {"finish", format_rational(ev.finish)}});
  }
  return j.dump(2) + "\n";
}

AsyncTrace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_trace(buf.str());
}

void save_trace_file(const AsyncTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << save_trace(trace);
}

MoveSeq load_move_seq(const std::string& text) {
  const json j = jsonio::parse_document(text, "moves");
  MoveSeq seq;
  seq.initial =
      config_from_json(jsonio::field(j, "initial", "moves"), "initial");
  const json& moves = jsonio::field(j, "moves", "moves");
  if (!moves.is_array()) jsonio::fail("moves", "expected an array");
  for (std::size_t i = 0; i < moves.size(); ++i) {
    seq.moves.push_back(
        get_int(moves[i], "moves[" + std::to_string(i) + "]"));
  }
  return seq;
}

std::string save_move_seq(const MoveSeq& seq) {
  json j;
  j["initial"] = config_to_json(seq.initial);
  j["moves"] = seq.moves;
  return j.dump(2) + "\n";
}

void save_move_seq_file(const MoveSeq& seq, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write moves file: " + path);
  out << save_move_seq(seq);
}

}  // namespace searchlight
