// Acceptance runner: one pass/fail line per criterion.
#include <cstdio>
#include <cstring>
#include <string>

#include <tentlab/selftest.hpp>

int main(int argc, char** argv) {
    tentlab::AcceptanceOptions opt;
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) {
        if (!std::strcmp(argv[i], "--quick")) {
            opt.quick = true;
        } else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) {
            opt.seed = std::stoull(argv[++i]);
        } else if (!std::strcmp(argv[i], "--criterion") && i + 1 < argc) {
            ids.push_back(std::stoi(argv[++i]));
        } else {
            std::fprintf(stderr, "usage: %s [--quick] [--seed N] [--criterion K]...\n", argv[0]);
            return 1;
        }
    }
    bool all_pass = true;
    for (const auto& r : tentlab::run_acceptance(opt, ids)) {
        std::printf("criterion %2d [%s]: %s -- %s\n", r.id, r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.detail.c_str());
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}
