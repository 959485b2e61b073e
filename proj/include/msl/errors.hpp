#pragma once

#include <stdexcept>
#include <string>

namespace msl {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// dcmm_model
class OmegaOutOfRange : public Error { public: using Error::Error; };
class InvalidFraction : public Error { public: using Error::Error; };

// degree_profiles
class DegenerateDraw : public Error { public: using Error::Error; };
class SingularPG : public Error { public: using Error::Error; };

// spectral_core
class EmptyGraph : public Error { public: using Error::Error; };
class NotSymmetric : public Error { public: using Error::Error; };
class ConvergenceFailure : public Error { public: using Error::Error; };

// estimator
class VertexHuntingStarved : public Error { public: using Error::Error; };
class RankDeficient : public Error { public: using Error::Error; };
class IllConditionedSimplex : public Error { public: using Error::Error; };

// population_oracle
class MissingPureNode : public Error { public: using Error::Error; };

// metrics
class KTooLargeForExhaustive : public Error { public: using Error::Error; };

// lower_bounds
class InvalidPerturbation : public Error { public: using Error::Error; };

// io / experiments
class ConfigError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

// Pipeline errors carry the step that failed so batch harnesses can log it.
class PipelineError : public Error {
public:
    PipelineError(std::string step, const std::string& msg)
        : Error("[" + step + "] " + msg), step_(std::move(step)) {}
    const std::string& step() const { return step_; }

private:
    std::string step_;
};

}  // namespace msl
