#include "tomokl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "tomokl/io.hpp"

namespace tomokl {

namespace {

struct SnrParts {
    double signal = 0.0;
    double error = 0.0;
};

SnrParts snr_parts(const Image2D& u, const Image2D& u0) {
    require_same_shape(u, u0, "snr");
    const double mean = sum(u0) / double(u0.size());
    auto ud = u.data();
    auto rd = u0.data();
    SnrParts p;
    for (std::size_t k = 0; k < ud.size(); ++k) {
        p.signal += (rd[k] - mean) * (rd[k] - mean);
        p.error += (ud[k] - rd[k]) * (ud[k] - rd[k]);
    }
    return p;
}

}  // namespace

double snr(const Image2D& u, const Image2D& u0) {
    const SnrParts p = snr_parts(u, u0);
    if (p.error == 0.0) throw UndefinedSnr();
    if (p.signal == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(p.signal / p.error);
}

double frobenius_error(const Image2D& u, const Image2D& u0) {
    require_same_shape(u, u0, "frobenius_error");
    auto ud = u.data();
    auto rd = u0.data();
    double acc = 0.0;
    for (std::size_t k = 0; k < ud.size(); ++k) acc += (ud[k] - rd[k]) * (ud[k] - rd[k]);
    return std::sqrt(acc);
}

std::string MetricReport::snr_text() const {
    switch (flag) {
        case SnrFlag::Undefined: return "undefined";
        case SnrFlag::NegativeInfinity: return "-inf";
        case SnrFlag::Finite: break;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", snr_db);
    return buf;
}

MetricReport evaluate(const Image2D& u, const Image2D& u0, std::string label) {
    MetricReport r;
    r.label = std::move(label);
    r.rows = u0.rows();
    r.cols = u0.cols();
    const SnrParts p = snr_parts(u, u0);
    if (p.error == 0.0) {
        r.flag = SnrFlag::Undefined;
    } else if (p.signal == 0.0) {
        r.flag = SnrFlag::NegativeInfinity;
    } else {
        r.snr_db = 10.0 * std::log10(p.signal / p.error);
    }
    r.frobenius = std::sqrt(p.error);
    return r;
}

void write_csv_header(std::ostream& os) { os << "experiment,item,metric,value,config_hash\n"; }

void write_csv_row(std::ostream& os, const std::string& experiment, const std::string& item,
                   const std::string& metric, const std::string& value, const std::string& config_hash) {
    os << experiment << ',' << item << ',' << metric << ',' << value << ',' << config_hash << '\n';
}

}  // namespace tomokl
