#pragma once

#include <string>
#include <vector>

namespace gbf {

enum class Verdict { Pass, Fail, IllDefined, Skipped };

const char* verdict_name(Verdict v);

struct CheckItem {
    std::string name;
    std::string ref;  // axiom or property the check exercises
    double residual = 0.0;
    Verdict verdict = Verdict::Pass;
    std::string note;
};

struct Report {
    std::vector<CheckItem> items;

    void add(std::string name, std::string ref, double residual, double tol,
             std::string note = {});
    void add_verdict(std::string name, std::string ref, Verdict v, double residual = 0.0,
                     std::string note = {});
    void merge(const Report& other, const std::string& prefix = {});

    bool all_pass() const;
    bool any_ill_defined() const;
    double max_residual() const;
};

}  // namespace gbf
