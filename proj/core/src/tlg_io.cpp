#include <fstream>
#include <sstream>

#include "adalogn/tlg.hpp"
#include "json_io.hpp"

namespace adalogn {

namespace detail {

ojson tlg_to_json(const Tlg& g) {
  ojson nodes = ojson::array();
  for (const Node& n : g.nodes()) {
    ojson jn;
    jn["id"] = n.id;
    jn["text"] = n.text;
    jn["part"] = std::string(to_string(n.part));
    jn["neg_of"] = n.neg_of ? ojson(*n.neg_of) : ojson(nullptr);
    if (n.inferred) jn["inferred"] = true;
    nodes.push_back(std::move(jn));
  }
  ojson edges = ojson::array();
  for (const Edge& e : g.edges()) {
    ojson je;
    je["src"] = e.src;
    je["rel"] = std::string(to_string(e.rel));
    je["dst"] = e.dst;
    if (g.is_inferred(e)) je["inferred"] = true;
    edges.push_back(std::move(je));
  }
  ojson doc;
  doc["nodes"] = std::move(nodes);
  doc["edges"] = std::move(edges);
  return doc;
}

Tlg tlg_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges")) {
      throw TlgError("malformed TLG document: expected object with 'nodes' and 'edges'");
    }
    std::vector<Node> nodes;
    for (const auto& jn : doc.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<int>();
      n.text = jn.at("text").get<std::string>();
      n.part = part_from_string(jn.at("part").get<std::string>());
      if (jn.contains("neg_of") && !jn.at("neg_of").is_null()) {
        n.neg_of = jn.at("neg_of").get<int>();
      }
      n.inferred = jn.value("inferred", false);
      nodes.push_back(std::move(n));
    }
    std::vector<Edge> edges;
    std::vector<Edge> inferred;
    for (const auto& je : doc.at("edges")) {
      Edge e{je.at("src").get<int>(),
             relation_from_string(je.at("rel").get<std::string>()),
             je.at("dst").get<int>()};
      edges.push_back(e);
      if (je.value("inferred", false)) inferred.push_back(e);
    }
    return Tlg::unchecked(std::move(nodes), std::move(edges), std::move(inferred));
  } catch (const nlohmann::json::exception& ex) {
    throw TlgError(std::string("malformed TLG document: ") + ex.what());
  }
}

Tlg tlg_from_json_checked(const nlohmann::json& doc) {
  Tlg g = tlg_from_json(doc);
  const auto violations = validate(g);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "invalid TLG (" << violations.size() << " violation"
       << (violations.size() == 1 ? "" : "s") << "):";
    for (const auto& v : violations) {
      os << "\n  " << to_string(v.kind) << ": " << v.detail;
    }
    throw TlgError(os.str());
  }
  return g;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace detail

std::string serialize(const Tlg& g) { return detail::tlg_to_json(g).dump(2) + "\n"; }

Tlg deserialize(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw TlgError(std::string("malformed TLG document: ") + ex.what());
  }
  return detail::tlg_from_json_checked(doc);
}

Tlg load_tlg(const std::string& path) { return deserialize(detail::read_file(path)); }

void save_tlg(const Tlg& g, const std::string& path) {
  detail::write_file(path, serialize(g));
}

namespace {

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string to_dot(const Tlg& g, std::string_view name) {
  std::ostringstream os;
  os << "digraph " << name << " {\n";
  for (const Node& n : g.nodes()) {
    os << "  n" << n.id << " [label=\"" << dot_escape(n.text) << "\", shape="
       << (n.part == Part::context ? "box" : "ellipse");
    if (n.inferred) os << ", style=dashed";
    os << "];\n";
  }
  for (const Edge& e : g.edges()) {
    if (e.rel == Relation::rev) continue;
    if (is_symmetric(e.rel) && e.src > e.dst) continue;
    os << "  n" << e.src << " -> n" << e.dst << " [label=\"" << to_string(e.rel)
       << '"';
    if (is_symmetric(e.rel)) os << ", dir=none";
    if (g.is_inferred(e)) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace adalogn
