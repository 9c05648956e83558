#pragma once

#include <iosfwd>
#include <string>

#include "spray/measures.hpp"

namespace spray {

struct Snapshot {
  SignedAtomCloud vortices;
  PhaseAtomCloud spray;
};

// Line-delimited JSON, one atom per line:
//   {"kind":"vortex","x1":...,"x2":...,"xi1":null,"xi2":null,"weight":...}
//   {"kind":"spray","x1":...,"x2":...,"xi1":...,"xi2":...,"weight":...}
// Floats carry 17 significant digits, so write -> read -> write is
// byte-identical.
void write_snapshot(std::ostream& os, const Snapshot& s);
Snapshot read_snapshot(std::istream& is);

void write_snapshot_file(const std::string& path, const Snapshot& s);
Snapshot read_snapshot_file(const std::string& path);

// shared float formatting for all text output (17 significant digits)
std::string format_double(double v);

}  // namespace spray
