#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "tomokl/image.hpp"

namespace tomokl {

/// Raised when u == u0, where the SNR ratio has a zero denominator.
class UndefinedSnr : public std::domain_error {
public:
    UndefinedSnr() : std::domain_error("undefined SNR: the signal equals the reference") {}
};

/// 10 log10(|u0 - mean(u0)|^2 / |u - u0|^2) in dB. A constant reference gives
/// -infinity; u == u0 throws UndefinedSnr.
double snr(const Image2D& u, const Image2D& u0);

/// sqrt(sum (u - u0)^2)
double frobenius_error(const Image2D& u, const Image2D& u0);

enum class SnrFlag { Finite, Undefined, NegativeInfinity };

struct MetricReport {
    std::string label;
    double snr_db = 0.0;  // meaningful only when flag == Finite
    SnrFlag flag = SnrFlag::Finite;
    double frobenius = 0.0;
    std::size_t rows = 0;
    std::size_t cols = 0;

    /// SNR as report text: the dB value, "undefined" or "-inf".
    std::string snr_text() const;
};

/// Never throws on the degenerate SNR cases; they come back flagged.
MetricReport evaluate(const Image2D& u, const Image2D& u0, std::string label);

/// CSV row writer for "experiment,item,metric,value,config_hash" tables.
void write_csv_header(std::ostream& os);
void write_csv_row(std::ostream& os, const std::string& experiment, const std::string& item,
                   const std::string& metric, const std::string& value, const std::string& config_hash);

}  // namespace tomokl
