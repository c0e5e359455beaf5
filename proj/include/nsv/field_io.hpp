#pragma once

// Plain-text field snapshot format:
//
//   # nsv field snapshot
//   domain.length = L1 L2 L3
//   domain.modes = N1 N2 N3
//   domain.grid = M1 M2 M3
//   components = C
//   kx ky kz component re im
//   <one line per coefficient, component is 0-based>
//
// Values are written with 17 significant digits so a write/read cycle is
// exact.

#include <iosfwd>
#include <string>
#include <vector>

#include "nsv/fields.hpp"

namespace nsv {

void write_snapshot(std::ostream& out, const std::vector<const SpectralField*>& components);
void write_snapshot(std::ostream& out, const SpectralVectorField& v);
void write_snapshot(std::ostream& out, const SpectralField& f);

/// Parses a snapshot; throws std::runtime_error with a line number on
/// malformed input.
std::vector<SpectralField> read_snapshot(std::istream& in);
SpectralVectorField read_vector_snapshot(std::istream& in);

/// Writes `contents` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace nsv
