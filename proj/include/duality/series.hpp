#pragma once

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "duality/errors.hpp"

// Small trigonometric series used for initial data: sums of
// amp * sin(2 pi k x + phase) plus an optional constant. The antiderivative
// is available in closed form, which the exact Burgers construction relies
// on for its potential.

namespace duality {

struct TrigTerm {
    double amp = 1.0;
    int k = 1;
    double phase = 0.0;
};

struct TrigSeries {
    std::vector<TrigTerm> terms;
    double constant = 0.0;

    static constexpr double two_pi = 6.283185307179586476925286766559;

    double value(double x) const {
        double s = constant;
        for (const auto& t : terms) s += t.amp * std::sin(two_pi * t.k * x + t.phase);
        return s;
    }

    double deriv(double x) const {
        double s = 0.0;
        for (const auto& t : terms)
            s += t.amp * two_pi * t.k * std::cos(two_pi * t.k * x + t.phase);
        return s;
    }

    // antiderivative with F(0) = 0; periodic over [0,1) iff constant == 0
    double antideriv(double x) const {
        double s = constant * x;
        for (const auto& t : terms) {
            const double w = two_pi * t.k;
            s += t.amp / w * (std::cos(t.phase) - std::cos(w * x + t.phase));
        }
        return s;
    }

    // mean over one period; pure sine terms integrate to zero
    double mean() const { return constant; }

    double max_amplitude() const {
        double s = std::abs(constant);
        for (const auto& t : terms) s += std::abs(t.amp);
        return s;
    }

    double max_slope() const {
        double s = 0.0;
        for (const auto& t : terms) s += std::abs(t.amp) * two_pi * std::abs(t.k);
        return s;
    }
};

// Grammar: terms joined by '+', each either "sin:k[:amp[:phase]]" or
// "const:c". Example: "sin:1+sin:3:0.25:1.57".
inline TrigSeries parse_trig_series(const std::string& text) {
    TrigSeries out;
    std::stringstream ss(text);
    std::string term;
    bool any = false;
    while (std::getline(ss, term, '+')) {
        if (term.empty()) continue;
        any = true;
        std::vector<std::string> parts;
        std::stringstream ts(term);
        std::string p;
        while (std::getline(ts, p, ':')) parts.push_back(p);
        try {
            if (parts.at(0) == "sin") {
                TrigTerm t;
                t.k = std::stoi(parts.at(1));
                if (parts.size() > 2) t.amp = std::stod(parts[2]);
                if (parts.size() > 3) t.phase = std::stod(parts[3]);
                if (t.k == 0) throw ConfigError("trig term needs k != 0: " + term);
                out.terms.push_back(t);
            } else if (parts.at(0) == "const") {
                out.constant += std::stod(parts.at(1));
            } else {
                throw ConfigError("unknown trig term '" + term +
                                  "' (expected sin:k[:amp[:phase]] or const:c)");
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception&) {
            throw ConfigError("could not parse trig term '" + term + "'");
        }
    }
    if (!any) throw ConfigError("empty trig series");
    return out;
}

}  // namespace duality
