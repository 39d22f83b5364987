#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace treepde {

struct TaskOutcome {
    int attempts = 0;
    int worker = -1;  // worker that completed the task
};

/// Thrown by a task body to signal a recoverable failure (the attempt is
/// discarded and the task re-queued).
struct TaskFault {
    std::uint64_t task;
    int attempt;
};

/// Runs tasks 0..n-1 on `workers` threads. Each worker owns a deque seeded
/// round-robin and steals from the back of others when idle. A task that
/// throws TaskFault is re-queued until it has failed `max_attempts` times,
/// which raises MaxAttemptsError; any other exception aborts the run.
std::vector<TaskOutcome> run_tasks(std::size_t n, int workers, int max_attempts,
                                   const std::function<void(std::size_t task, int attempt,
                                                            int worker)>& body);

/// Deterministic per-attempt failure draw for fault-injection tests.
bool inject_fault(std::uint64_t seed, std::uint64_t task, int attempt, double rate);

/// Worker count from TREEPDE_THREADS, else hardware concurrency.
int default_workers();

}  // namespace treepde
