#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace fgw {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

enum class ErrorKind {
  NonSquare,
  AsymmetricAdjacency,
  NonBinaryEntry,
  RowCountMismatch,
  SizeMismatch,
  LabelOutOfRange,
  NegativeTau,
  ParseError,
  SchemaVersionMismatch,
  DimMismatch,
  NonFiniteCost,
  DidNotConverge,
  ShapeMismatch,
  WeightError,
  NotPositiveDefinite,
  EmptyCandidateSet,
  InsufficientTrainingData,
  OutOfRange,
  IoError,
  NumericError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace fgw
