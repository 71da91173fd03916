#pragma once

// Graphviz emission for Dag and Pdag. Output is deterministic: nodes in
// declaration order, directed edges in (tail, head) index order, undirected
// edges as a - b pairs with a < b rendered with dir=none.

#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bnkit/graph.hpp"

namespace bnkit {

struct DotOptions {
  std::string graph_name = "g";
  // Emitted as // comments before the digraph block (used to embed the
  // resolved run configuration in artifacts).
  std::vector<std::string> header_comments;
  // Optional fillcolor per node index; nodes present here get style=filled.
  std::map<int, std::string> node_fill;
  // Optional label per directed or undirected edge. Undirected edges are
  // keyed by the (min, max) index pair.
  std::map<std::pair<int, int>, std::string> edge_labels;
  bool shape_by_kind = true;  // discrete => box, continuous => ellipse
};

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

inline void dot_header(std::ostringstream& out, const DotOptions& opt) {
  for (const auto& line : opt.header_comments) out << "// " << line << "\n";
  out << "digraph " << dot_quote(opt.graph_name) << " {\n";
}

template <class G>
void dot_nodes(std::ostringstream& out, const G& g, const DotOptions& opt) {
  for (int v = 0; v < g.size(); ++v) {
    const Node& n = g.node(v);
    out << "  " << dot_quote(n.name) << " [";
    bool first = true;
    auto attr = [&](const std::string& k, const std::string& v_) {
      if (!first) out << ", ";
      out << k << "=" << v_;
      first = false;
    };
    if (opt.shape_by_kind)
      attr("shape", n.kind == NodeKind::Discrete ? "box" : "ellipse");
    auto fill = opt.node_fill.find(v);
    if (fill != opt.node_fill.end()) {
      attr("style", "filled");
      attr("fillcolor", dot_quote(fill->second));
    }
    out << "];\n";
  }
}

inline void dot_edge_attrs(std::ostringstream& out, const DotOptions& opt,
                           std::pair<int, int> key, bool undirected) {
  std::vector<std::string> attrs;
  auto label = opt.edge_labels.find(key);
  if (label != opt.edge_labels.end()) attrs.push_back("label=" + dot_quote(label->second));
  if (undirected) attrs.push_back("dir=none");
  if (attrs.empty()) return;
  out << " [";
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (i) out << ", ";
    out << attrs[i];
  }
  out << "]";
}

}  // namespace detail

inline std::string to_dot(const Dag& d, const DotOptions& opt = {}) {
  std::ostringstream out;
  detail::dot_header(out, opt);
  detail::dot_nodes(out, d, opt);
  for (const auto& [from, to] : d.edges()) {
    out << "  " << detail::dot_quote(d.node(from).name) << " -> "
        << detail::dot_quote(d.node(to).name);
    detail::dot_edge_attrs(out, opt, {from, to}, false);
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

inline std::string to_dot(const Pdag& g, const DotOptions& opt = {}) {
  std::ostringstream out;
  detail::dot_header(out, opt);
  detail::dot_nodes(out, g, opt);
  for (const auto& [from, to] : g.directed_edges()) {
    out << "  " << detail::dot_quote(g.node(from).name) << " -> "
        << detail::dot_quote(g.node(to).name);
    detail::dot_edge_attrs(out, opt, {from, to}, false);
    out << ";\n";
  }
  for (const auto& [a, b] : g.undirected_edges()) {
    out << "  " << detail::dot_quote(g.node(a).name) << " -> "
        << detail::dot_quote(g.node(b).name);
    detail::dot_edge_attrs(out, opt, {a, b}, true);
    out << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace bnkit
