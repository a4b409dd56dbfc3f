// Acceptance driver: `acceptance --criterion N` runs the experiment graded by
// criterion N with its default settings and prints one PASS/FAIL line;
// without arguments every criterion is run in turn.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "volcano/experiments.hpp"

namespace vx = volcano::experiments;

namespace {

bool grade(int n) {
    const std::string name = vx::experiment_for_criterion(n);
    vx::Outcome o;
    try {
        o = vx::run(vx::default_config(name));
    } catch (const std::exception& e) {
        o.error = e.what();
    }
    std::cout << "criterion " << n << " (" << name << "): " << (o.pass() ? "PASS" : "FAIL");
    if (!o.error.empty()) std::cout << "  error: " << o.error;
    for (const auto& c : o.checks)
        if (!c.pass) std::cout << "  [" << c.name << " = " << c.value << "]";
    std::cout << '\n';
    return o.pass();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    int criterion = 0;
    app.add_option("--criterion", criterion, "criterion to grade (1..9); all when omitted")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    std::vector<int> which;
    if (criterion > 0) which.push_back(criterion);
    else
        for (int n = 1; n <= 9; ++n) which.push_back(n);
    bool all = true;
    for (int n : which) all = grade(n) && all;
    return all ? 0 : 1;
}
