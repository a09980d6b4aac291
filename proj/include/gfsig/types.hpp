#ifndef GFSIG_TYPES_HPP
#define GFSIG_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace gfsig {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Raised for invalid parameters or malformed inputs anywhere in the library.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Signature families, deterministic and random.
enum class Family { cubic, power_residue, sidelnikov, trace, custom, gaussian, musa, qpsk };

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::cubic: return "cubic";
        case Family::power_residue: return "pr";
        case Family::sidelnikov: return "sidelnikov";
        case Family::trace: return "trace";
        case Family::custom: return "custom";
        case Family::gaussian: return "gaussian";
        case Family::musa: return "musa";
        case Family::qpsk: return "qpsk";
    }
    return "unknown";
}

inline Family parse_family(std::string_view s) {
    if (s == "cubic") return Family::cubic;
    if (s == "pr" || s == "power_residue") return Family::power_residue;
    if (s == "sidelnikov" || s == "sid") return Family::sidelnikov;
    if (s == "trace") return Family::trace;
    if (s == "custom") return Family::custom;
    if (s == "gaussian") return Family::gaussian;
    if (s == "musa") return Family::musa;
    if (s == "qpsk") return Family::qpsk;
    throw InvalidArgument("unknown family: " + std::string(s));
}

inline bool is_deterministic(Family f) {
    return f == Family::cubic || f == Family::power_residue || f == Family::sidelnikov ||
           f == Family::trace;
}

/// exp(j*2*pi*num/den) evaluated from the reduced phase num mod den.
inline cdouble unit_phasor(std::int64_t num, std::int64_t den) {
    std::int64_t r = num % den;
    if (r < 0) r += den;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(den);
    return {std::cos(angle), std::sin(angle)};
}

}  // namespace gfsig

#endif  // GFSIG_TYPES_HPP
