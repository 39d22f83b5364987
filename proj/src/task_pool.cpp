#include "treepde/task_pool.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "treepde/errors.hpp"
#include "treepde/rng.hpp"

namespace treepde {

namespace {

struct WorkQueue {
    std::mutex mu;
    std::deque<std::size_t> items;

    bool pop_front(std::size_t& out) {
        std::lock_guard<std::mutex> lk(mu);
        if (items.empty()) return false;
        out = items.front();
        items.pop_front();
        return true;
    }
    bool steal_back(std::size_t& out) {
        std::lock_guard<std::mutex> lk(mu);
        if (items.empty()) return false;
        out = items.back();
        items.pop_back();
        return true;
    }
    void push(std::size_t v) {
        std::lock_guard<std::mutex> lk(mu);
        items.push_back(v);
    }
};

}  // namespace

std::vector<TaskOutcome> run_tasks(std::size_t n, int workers, int max_attempts,
                                   const std::function<void(std::size_t, int, int)>& body) {
    std::vector<TaskOutcome> out(n);
    if (n == 0) return out;
    workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
    std::vector<std::unique_ptr<WorkQueue>> queues;
    for (int w = 0; w < workers; ++w) queues.push_back(std::make_unique<WorkQueue>());
    for (std::size_t i = 0; i < n; ++i) queues[i % workers]->items.push_back(i);

    std::atomic<std::size_t> remaining{n};
    std::atomic<bool> stop{false};
    std::exception_ptr err;
    std::mutex err_mu;

    auto worker_loop = [&](int w) {
        while (!stop && remaining > 0) {
            std::size_t task;
            bool got = queues[w]->pop_front(task);
            for (int k = 1; !got && k < workers; ++k) got = queues[(w + k) % workers]->steal_back(task);
            if (!got) {
                std::this_thread::sleep_for(std::chrono::microseconds(50));
                continue;
            }
            int attempt = ++out[task].attempts;
            try {
                body(task, attempt, w);
                out[task].worker = w;
                --remaining;
            } catch (const TaskFault&) {
                if (attempt >= max_attempts) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!err)
                        err = std::make_exception_ptr(MaxAttemptsError(
                            "task " + std::to_string(task) + " failed " + std::to_string(attempt) +
                            " consecutive attempts"));
                    stop = true;
                } else {
                    queues[w]->push(task);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                stop = true;
            }
        }
    };

    if (workers == 1) {
        worker_loop(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker_loop, w);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
    return out;
}

bool inject_fault(std::uint64_t seed, std::uint64_t task, int attempt, double rate) {
    if (rate <= 0.0) return false;
    RngStream r(mix64(seed, 0xFA17ULL), mix64(task, static_cast<std::uint64_t>(attempt)));
    return r.uniform() < rate;
}

int default_workers() {
    if (const char* env = std::getenv("TREEPDE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
        throw ConfigError(std::string("TREEPDE_THREADS must be a positive integer, got '") + env + "'");
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace treepde
