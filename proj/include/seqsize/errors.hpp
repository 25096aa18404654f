#pragma once

#include <stdexcept>
#include <string>

namespace seqsize {

// Base for every error raised by the library. The CLI maps the three
// families below onto distinct exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- numerical / model fitting -------------------------------------------

class FitError : public Error {
public:
    using Error::Error;
};

class NonConvergence : public FitError {
public:
    explicit NonConvergence(int iterations)
        : FitError("IRLS did not converge within " + std::to_string(iterations) + " iterations") {}
};

class QuasiSeparation : public FitError {
public:
    QuasiSeparation() : FitError("fitted risks pinned at 0/1: data are quasi-separated") {}
};

class DegenerateOutcome : public FitError {
public:
    DegenerateOutcome() : FitError("outcome vector contains a single class") {}
};

class SingularDesign : public FitError {
public:
    SingularDesign() : FitError("weighted normal equations are rank-deficient") {}
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class ConstantLogit : public FitError {
public:
    ConstantLogit() : FitError("logit of the risks has (near-)zero variance") {}
};

class TooManyDegenerateReplicates : public FitError {
public:
    TooManyDegenerateReplicates(int failures, int b)
        : FitError("bootstrap gave up: " + std::to_string(failures) + " failed fits across " +
                   std::to_string(b) + " replicates") {}
};

class UnsplittableCohort : public FitError {
public:
    UnsplittableCohort()
        : FitError("cannot form stratified CV folds with both outcome classes in every fold") {}
};

class InvalidR2 : public FitError {
public:
    using FitError::FitError;
};

class RootBracketFailure : public FitError {
public:
    using FitError::FitError;
};

class CohortTooSmall : public Error {
public:
    using Error::Error;
};

// --- data / file handling --------------------------------------------------

class DataError : public Error {
public:
    using Error::Error;
};

class MissingHeader : public DataError {
public:
    using DataError::DataError;
};

class EmptyFile : public DataError {
public:
    using DataError::DataError;
};

class NonBinaryOutcome : public DataError {
public:
    using DataError::DataError;
};

class MissingValue : public DataError {
public:
    using DataError::DataError;
};

class DuplicateOrder : public DataError {
public:
    using DataError::DataError;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class InsufficientPoints : public DataError {
public:
    using DataError::DataError;
};

// --- configuration ----------------------------------------------------------

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace seqsize
