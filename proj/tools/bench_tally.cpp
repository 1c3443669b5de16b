// Times the committee's sheet scan on a stuffed ballot box: OpenMP kernel
// against the serial reference, verifying byte-identical reports.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "bpv/agents.hpp"
#include "bpv/registration.hpp"
#include "bpv/tally.hpp"
#include "bpv/textio.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t sheet_count = 1'000'000;
    std::size_t voter_count = 50;
    int rounds = 3;
    if (argc > 1) sheet_count = static_cast<std::size_t>(std::strtoull(argv[1], nullptr, 10));
    if (argc > 2) voter_count = static_cast<std::size_t>(std::strtoull(argv[2], nullptr, 10));
    if (argc > 3) rounds = std::atoi(argv[3]);

    bpv::ElectionParams params;
    params.candidates = {"north", "south", "east", "west"};
    params.seats = 2;

    bpv::Rng rng(20240613);
    std::vector<std::string> roll;
    for (std::size_t i = 0; i < voter_count; ++i) roll.push_back("voter-" + std::to_string(i));
    auto registry = bpv::Registry::register_voters(roll, rng, 1000);

    std::vector<std::string> payloads;
    payloads.reserve(sheet_count + voter_count);
    for (const auto& voter : roll) {
        bpv::VoteIntent intent;
        intent.voted_for.insert(params.candidates[rng.below(params.candidates.size())]);
        auto paper = bpv::make_ballot(intent, params, rng, registry.id_of(voter));
        registry.submit_grid(registry.id_of(voter), paper.grid, 1);
        payloads.push_back(bpv::to_text(paper.grille));
    }
    const std::size_t length = params.grid_length();
    for (std::size_t i = 0; i < sheet_count; ++i) {
        bpv::Grille fake;
        fake.id = bpv::BallotId{rng.next_u128()};
        fake.bits.resize(length);
        for (auto& bit : fake.bits) bit = rng.coin() ? 1 : 0;
        payloads.push_back(bpv::to_text(fake));
    }
    const auto& handover = registry.seal_and_handover(true);

#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif
    std::printf("sheets: %zu (%zu genuine)\n", payloads.size(), voter_count);

    double best_serial = 1e30;
    double best_parallel = 1e30;
    std::string serial_text;
    std::string parallel_text;
    for (int round = 0; round < rounds; ++round) {
        auto start = std::chrono::steady_clock::now();
        auto serial = bpv::tally_serial(payloads, handover, params);
        double serial_time = seconds_since(start);
        best_serial = std::min(best_serial, serial_time);
        serial_text = bpv::report_to_text(serial.report());

        start = std::chrono::steady_clock::now();
        auto parallel = bpv::tally(payloads, handover, params);
        double parallel_time = seconds_since(start);
        best_parallel = std::min(best_parallel, parallel_time);
        parallel_text = bpv::report_to_text(parallel.report());

        std::printf("round %d: serial %.3fs, parallel %.3fs\n", round, serial_time,
                    parallel_time);
    }

    if (serial_text != parallel_text) {
        std::printf("MISMATCH: parallel report differs from the serial reference\n");
        return 1;
    }
    std::printf("reports byte-identical: yes\n");
    std::printf("best serial:   %.3fs (%.1f Msheets/s)\n", best_serial,
                payloads.size() / best_serial / 1e6);
    std::printf("best parallel: %.3fs (%.1f Msheets/s)\n", best_parallel,
                payloads.size() / best_parallel / 1e6);
    std::printf("speedup: %.2fx\n", best_serial / best_parallel);
    return 0;
}
