// Copyright 2026 the planecal authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace planecal {

/// Root of all planecal exceptions.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or geometrically unusable input (files, degenerate features).
/// CLI exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Optimization or observability failure. CLI exit code 3.
class SolverError : public Error {
 public:
  using Error::Error;
};

// --- geometry ---------------------------------------------------------------

class NonPositiveDepthError : public DataError {
 public:
  explicit NonPositiveDepthError(double depth)
      : DataError("point has non-positive camera depth " +
                  std::to_string(depth)),
        depth(depth) {}
  double depth;
};

class DegenerateLineError : public DataError {
 public:
  using DataError::DataError;
};

class ParallelPlanesError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateConfigurationError : public DataError {
 public:
  using DataError::DataError;
};

class PointAtInfinityError : public DataError {
 public:
  using DataError::DataError;
};

// --- lidar features ----------------------------------------------------------

class EmptyResultError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientPointsError : public DataError {
 public:
  using DataError::DataError;
};

class NoConsensusError : public DataError {
 public:
  using DataError::DataError;
};

class NoRingStructureError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientEdgePointsError : public DataError {
 public:
  using DataError::DataError;
};

/// Fewer than the four required boundary lines reached the inlier floor,
/// e.g. when an edge is parallel to the scan rings.
class LineDeficitError : public DataError {
 public:
  explicit LineDeficitError(int lines_found)
      : DataError("only " + std::to_string(lines_found) +
                  " of 4 boundary lines found"),
        lines_found(lines_found) {}
  int lines_found;
};

class EdgeLabelingError : public DataError {
 public:
  using DataError::DataError;
};

// --- camera features ---------------------------------------------------------

class ParallelAdjacentLinesError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateCornersError : public DataError {
 public:
  using DataError::DataError;
};

class PnPDivergedError : public DataError {
 public:
  explicit PnPDivergedError(double rms_px)
      : DataError("PnP refinement stalled at reprojection RMS " +
                  std::to_string(rms_px) + " px"),
        rms_px(rms_px) {}
  double rms_px;
};

// --- solver ------------------------------------------------------------------

class ObservabilityError : public SolverError {
 public:
  using SolverError::SolverError;
};

class NumericalFailureError : public SolverError {
 public:
  using SolverError::SolverError;
};

// --- synthetic ---------------------------------------------------------------

class NoHitsError : public DataError {
 public:
  using DataError::DataError;
};

class BehindCameraError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace planecal
