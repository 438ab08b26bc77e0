#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "hcf/cantor.hpp"
#include "hcf/dimension.hpp"
#include "hcf/error.hpp"

namespace hcf {

// Line-oriented family dump:
//   hcf-family 1
//   kind <small-o|tau>
//   rate <psi>
//   depth <d>
//   meta <key> <value>
//   node <id> <parent> <level> <primed> <mark> <mass> <ext> <center> <radius>
// ext is comma-separated digits or '-' for the empty word.
struct FamilyDump {
  std::string kind;
  std::string rate;
  int depth = 0;
  std::map<std::string, std::string> meta;
  CantorTree tree;
};

inline std::string dump_family(const std::string& kind, const std::string& rate, int depth, const CantorTree& t,
                               const std::map<std::string, std::string>& meta = {}) {
  std::ostringstream os;
  os << "hcf-family 1\nkind " << kind << "\nrate " << rate << "\ndepth " << depth << "\n";
  for (const auto& [k, v] : meta) os << "meta " << k << " " << v << "\n";
  for (size_t i = 0; i < t.size(); ++i) {
    const auto& n = t[static_cast<int>(i)];
    std::string ext = n.ext.empty() ? "-" : n.ext.str();
    Rational rad = i == 0 ? Rational(1) : node_radius(n);
    os << "node " << i << " " << n.parent << " " << n.level << " " << (n.primed ? 1 : 0) << " " << n.mark << " "
       << n.mass.str() << " " << ext << " " << node_center(n).str() << " " << rad.str() << "\n";
  }
  return os.str();
}

inline FamilyDump parse_family(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  FamilyDump d;
  bool header = false;
  size_t lineno = 0;
  auto bad = [&](const std::string& why) { fail(Errc::ParseError, "family dump line " + std::to_string(lineno) + ": " + why); };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (!header) {
      int v = 0;
      if (key != "hcf-family" || !(ls >> v) || v != 1) bad("not a family dump");
      header = true;
      continue;
    }
    if (key == "kind") ls >> d.kind;
    else if (key == "rate") std::getline(ls >> std::ws, d.rate);
    else if (key == "depth") ls >> d.depth;
    else if (key == "meta") {
      std::string k, v;
      ls >> k;
      std::getline(ls >> std::ws, v);
      d.meta[k] = v;
    }
    else if (key == "node") {
      long id, parent, level, primed;
      size_t mark;
      std::string mass, ext, center, radius;
      if (!(ls >> id >> parent >> level >> primed >> mark >> mass >> ext >> center >> radius)) bad("short node record");
      if (id == 0) {
        if (parent != -1) bad("root must have parent -1");
        d.tree.at(0).mass = parse_rational(mass);
        continue;
      }
      if (id != static_cast<long>(d.tree.size()) || parent < 0 || parent >= id) bad("nodes out of order");
      int nid = d.tree.add(static_cast<int>(parent), parse_digits(ext), static_cast<int>(level), primed != 0, mark);
      d.tree.at(nid).mass = parse_rational(mass);
      if (node_center(d.tree[nid]) != parse_gauss_rat(center) || node_radius(d.tree[nid]) != parse_rational(radius))
        bad("center or radius disagrees with the digits");
    } else {
      bad("unknown record '" + key + "'");
    }
  }
  if (!header) fail(Errc::ParseError, "empty family dump");
  return d;
}

// finest level present in the dump
inline CoverSnapshot snapshot_of(const FamilyDump& d) {
  int top = 0;
  for (const auto& n : d.tree.nodes()) top = std::max(top, n.level);
  std::vector<int> ids;
  for (int id : d.tree.leaves())
    if (id > 0 && d.tree[id].level == top) ids.push_back(id);
  return snapshot_of(d.tree, ids, top);
}

inline std::string counts_csv(const std::vector<ScaleCount>& c) {
  std::string s = "scale,count\n";
  for (const auto& x : c) s += x.scale.str() + "," + std::to_string(x.count) + "\n";
  return s;
}

// write to a sibling temporary, then rename over the target
inline void write_atomic(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::InvalidArgument, "cannot write " + tmp.string());
    out << text;
    if (!out) fail(Errc::InvalidArgument, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(Errc::InvalidArgument, "cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace hcf
