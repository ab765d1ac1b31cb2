#ifndef ISOPERIODIC_ERRORS_HPP
#define ISOPERIODIC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isoperiodic
{

// Base class for every error raised by the library. Callers that only need
// "did the computation fail" catch this; tests match on the concrete types.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
    using Error::Error;
};

// numerics_core

class NonConvergence : public Error
{
public:
    NonConvergence(const std::string &what, double achieved_error)
        : Error(what), achieved_error_(achieved_error)
    {
    }
    double achieved_error() const noexcept { return achieved_error_; }

private:
    double achieved_error_;
};

class StepSizeUnderflow : public Error
{
public:
    StepSizeUnderflow(const std::string &what, double t) : Error(what), t_(t) {}
    double location() const noexcept { return t_; }

private:
    double t_;
};

class MaxStepsExceeded : public Error
{
public:
    MaxStepsExceeded(const std::string &what, double t) : Error(what), t_(t) {}
    double location() const noexcept { return t_; }

private:
    double t_;
};

class RhsEvaluationError : public Error
{
public:
    RhsEvaluationError(const std::string &what, double t) : Error(what), t_(t) {}
    double location() const noexcept { return t_; }

private:
    double t_;
};

// elliptic_curve

class DegenerateCurve : public Error
{
public:
    using Error::Error;
};

class InvalidGeometry : public Error
{
public:
    using Error::Error;
};

class BranchPointCollision : public Error
{
public:
    using Error::Error;
};

class ContinuationAmbiguity : public Error
{
public:
    using Error::Error;
};

class OrientationError : public Error
{
public:
    using Error::Error;
};

class PoleAtRamification : public Error
{
public:
    using Error::Error;
};

class PoleCollision : public Error
{
public:
    using Error::Error;
};

// bell

class PartitionBoundExceeded : public Error
{
public:
    using Error::Error;
};

// isoperiodic_flow

class DegenerateDeformation : public Error
{
public:
    using Error::Error;
};

class BellSingularity : public Error
{
public:
    using Error::Error;
};

class RegionExit : public Error
{
public:
    using Error::Error;
};

// boussinesq

class TruncationInsufficient : public Error
{
public:
    using Error::Error;
};

class ThetaDivisorProximity : public Error
{
public:
    using Error::Error;
};

class IllConditioned : public Error
{
public:
    using Error::Error;
};

// cli

class ConfigError : public Error
{
public:
    ConfigError(const std::string &field_path, const std::string &what)
        : Error(field_path + ": " + what), field_path_(field_path)
    {
    }
    const std::string &field_path() const noexcept { return field_path_; }

private:
    std::string field_path_;
};

} // namespace isoperiodic

#endif
