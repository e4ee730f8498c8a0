#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sleepcolor/errors.hpp"
#include "sleepcolor/graph.hpp"

namespace sleepcolor {

// Instance file format (ASCII, line oriented, '#' starts a comment):
//
//   dlc 1 <n> <m>
//   node <id> <c1> <c2> ... <ck>      one line per node
//   edge <u> <v>                      one line per edge

namespace detail {

inline std::vector<std::string_view> split_words(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

inline std::uint64_t parse_u64(std::string_view word, std::size_t line_no) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
  if (ec != std::errc{} || ptr != word.data() + word.size()) {
    throw ParseError(line_no, "expected a non-negative integer, got '" + std::string(word) + "'");
  }
  return value;
}

}  // namespace detail

inline ColoringInstance read_instance(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  std::uint64_t expect_n = 0;
  std::uint64_t expect_m = 0;
  std::map<std::uint64_t, ColorList> lists;
  std::vector<Edge> edges;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto words = detail::split_words(line);
    if (words.empty()) continue;

    if (!have_header) {
      if (words.size() != 4 || words[0] != "dlc" || words[1] != "1") {
        throw ParseError(line_no, "expected header 'dlc 1 <n> <m>'");
      }
      expect_n = detail::parse_u64(words[2], line_no);
      expect_m = detail::parse_u64(words[3], line_no);
      have_header = true;
      continue;
    }

    if (words[0] == "node") {
      if (words.size() < 2) throw ParseError(line_no, "node line needs an id");
      const auto id = detail::parse_u64(words[1], line_no);
      ColorList list;
      for (std::size_t k = 2; k < words.size(); ++k) {
        const auto c = detail::parse_u64(words[k], line_no);
        if (c == 0 || c > std::numeric_limits<Color>::max()) {
          throw ParseError(line_no, "color out of range: " + std::string(words[k]));
        }
        list.push_back(static_cast<Color>(c));
      }
      if (!lists.emplace(id, std::move(list)).second) {
        throw ParseError(line_no, "node " + std::to_string(id) + " listed twice");
      }
    } else if (words[0] == "edge") {
      if (words.size() != 3) throw ParseError(line_no, "edge line needs exactly two ids");
      edges.push_back({NodeId{detail::parse_u64(words[1], line_no)},
                       NodeId{detail::parse_u64(words[2], line_no)}});
    } else {
      throw ParseError(line_no, "unknown record '" + std::string(words[0]) + "'");
    }
  }

  if (!have_header) throw ParseError(line_no, "missing header");
  if (lists.size() != expect_n) {
    throw ParseError(line_no, "header announces " + std::to_string(expect_n) + " nodes, found " +
                                  std::to_string(lists.size()));
  }
  if (edges.size() != expect_m) {
    throw ParseError(line_no, "header announces " + std::to_string(expect_m) + " edges, found " +
                                  std::to_string(edges.size()));
  }

  std::vector<NodeId> ids;
  ids.reserve(lists.size());
  for (const auto& [id, list] : lists) ids.push_back(NodeId{id});
  ColoringInstance inst;
  inst.graph = Graph::build(edges, ids);
  // std::map iterates in id order, which is the graph's index order.
  for (auto& [id, list] : lists) inst.lists.push_back(normalize_list(std::move(list)));
  validate_instance(inst);
  return inst;
}

inline ColoringInstance read_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InstanceError("cannot open " + path);
  return read_instance(in);
}

inline void write_instance(const ColoringInstance& inst, std::ostream& out) {
  const auto edges = inst.graph.edges();
  out << "dlc 1 " << inst.size() << ' ' << edges.size() << '\n';
  for (NodeIndex v = 0; v < inst.size(); ++v) {
    out << "node " << inst.graph.id(v);
    for (Color c : inst.lists[v]) out << ' ' << c;
    out << '\n';
  }
  for (const Edge& e : edges) out << "edge " << e.u << ' ' << e.v << '\n';
}

inline void write_instance_file(const ColoringInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InstanceError("cannot write " + path);
  write_instance(inst, out);
}

}  // namespace sleepcolor
