// Copyright 2026 The vineskel Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vineskel {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// Shape or dimension mismatch between inputs (masks, cameras, rows).
class ShapeError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t byte_offset, const std::string& what)
      : Error(file + ": byte " + std::to_string(byte_offset) + ": " + what),
        file_(file),
        byte_offset_(byte_offset) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::string file_;
  std::size_t byte_offset_;
};

class AlignmentFailed : public Error {
 public:
  AlignmentFailed(int iterations, const std::string& why)
      : Error("ICP alignment failed after " + std::to_string(iterations) + " iterations: " + why),
        iterations_(iterations) {}

  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

/// Pairwise registration failure, tagged with the frame that could not be placed.
class RegistrationError : public Error {
 public:
  RegistrationError(std::size_t frame_index, const AlignmentFailed& cause)
      : Error("frame " + std::to_string(frame_index) + ": " + cause.what()),
        frame_index_(frame_index),
        iterations_(cause.iterations()) {}

  std::size_t frame_index() const noexcept { return frame_index_; }
  int iterations() const noexcept { return iterations_; }

 private:
  std::size_t frame_index_;
  int iterations_;
};

class MissingProvenance : public Error {
 public:
  using Error::Error;
};

class InvalidCluster : public Error {
 public:
  using Error::Error;
};

class DegenerateFeature : public Error {
 public:
  explicit DegenerateFeature(const std::string& feature)
      : Error("feature '" + feature + "' is constant across training rows"), feature_(feature) {}

  const std::string& feature() const noexcept { return feature_; }

 private:
  std::string feature_;
};

class InsufficientRows : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

/// Pipeline stage failure; carries the stage name for the CLI exit message.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& cause)
      : Error("stage '" + stage + "' failed: " + cause), stage_(stage) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace vineskel
