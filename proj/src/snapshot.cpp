#include "spray/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "spray/errors.hpp"

namespace spray {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot(std::ostream& os, const Snapshot& s) {
  for (const Atom& a : s.vortices.atoms) {
    os << "{\"kind\":\"vortex\",\"x1\":" << format_double(a.pos.x)
       << ",\"x2\":" << format_double(a.pos.y) << ",\"xi1\":null,\"xi2\":null,\"weight\":"
       << format_double(a.weight) << "}\n";
  }
  for (const PhaseAtom& a : s.spray.atoms) {
    os << "{\"kind\":\"spray\",\"x1\":" << format_double(a.pos.x)
       << ",\"x2\":" << format_double(a.pos.y) << ",\"xi1\":" << format_double(a.vel.x)
       << ",\"xi2\":" << format_double(a.vel.y) << ",\"weight\":" << format_double(a.weight)
       << "}\n";
  }
}

Snapshot read_snapshot(std::istream& is) {
  Snapshot s;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw error("snapshot: bad JSON on line " + std::to_string(lineno) + ": " + e.what());
    }
    for (const auto& key : {"kind", "x1", "x2", "xi1", "xi2", "weight"})
      if (!rec.contains(key))
        throw error("snapshot: missing field '" + std::string(key) + "' on line " +
                    std::to_string(lineno));
    std::string kind = rec["kind"].get<std::string>();
    Vec2 pos{rec["x1"].get<double>(), rec["x2"].get<double>()};
    double w = rec["weight"].get<double>();
    if (kind == "vortex") {
      if (!rec["xi1"].is_null() || !rec["xi2"].is_null())
        throw error("snapshot: vortex with velocity on line " + std::to_string(lineno));
      s.vortices.atoms.push_back({pos, w});
    } else if (kind == "spray") {
      if (rec["xi1"].is_null() || rec["xi2"].is_null())
        throw error("snapshot: spray atom without velocity on line " + std::to_string(lineno));
      s.spray.atoms.push_back({pos, {rec["xi1"].get<double>(), rec["xi2"].get<double>()}, w});
    } else {
      throw error("snapshot: unknown kind '" + kind + "' on line " + std::to_string(lineno));
    }
  }
  // revalidate through the checked constructors
  s.vortices = SignedAtomCloud(std::move(s.vortices.atoms));
  s.spray = PhaseAtomCloud(std::move(s.spray.atoms));
  return s;
}

void write_snapshot_file(const std::string& path, const Snapshot& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw error("snapshot: cannot open for writing: " + path);
  write_snapshot(os, s);
  if (!os.good()) throw error("snapshot: write failed: " + path);
}

Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw error("snapshot: cannot open: " + path);
  return read_snapshot(is);
}

}  // namespace spray
