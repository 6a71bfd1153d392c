#include "prq/sat.hpp"

#include <nlohmann/json.hpp>

#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace prq {

CnfInstance encode_avoidance(long N, int k, const Pattern& p, bool break_symmetry) {
    if (N < 1 || k < 1) throw std::invalid_argument("encode_avoidance needs N, k >= 1");
    if (!p.integer_valued())
        throw std::invalid_argument("pattern " + p.name + " is not integer-valued");
    CnfInstance inst;
    inst.N = N;
    inst.k = k;
    inst.pattern_name = p.name;
    inst.num_vars = static_cast<int>(N * k);

    // Exactly one color per number.
    for (long n = 1; n <= N; ++n) {
        std::vector<int> alo;
        for (int c = 0; c < k; ++c) alo.push_back(inst.var(n, c));
        inst.clauses.push_back(alo);
        for (int c = 0; c < k; ++c)
            for (int c2 = c + 1; c2 < k; ++c2)
                inst.clauses.push_back({-inst.var(n, c), -inst.var(n, c2)});
    }

    // One avoidance clause per distinct in-range instantiation per color.
    std::set<std::vector<long>> seen;
    for_each_inrange_instantiation(p, N, [&](const std::vector<long>& values) {
        if (!seen.insert(values).second) return;
        for (int c = 0; c < k; ++c) {
            std::vector<int> clause;
            for (long v : values) clause.push_back(-inst.var(v, c));
            inst.clauses.push_back(clause);
        }
    });

    if (break_symmetry) inst.clauses.push_back({inst.var(1, 0)});
    return inst;
}

std::string write_dimacs(const CnfInstance& inst) {
    std::ostringstream os;
    os << "p cnf " << inst.num_vars << " " << inst.clauses.size() << "\n";
    for (const auto& clause : inst.clauses) {
        for (int lit : clause) os << lit << " ";
        os << "0\n";
    }
    return os.str();
}

void write_dimacs_file(const CnfInstance& inst, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << write_dimacs(inst);
}

CnfInstance parse_dimacs(const std::string& text) {
    CnfInstance inst;
    std::istringstream is(text);
    std::string line;
    bool header = false;
    std::vector<int> current;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == 'c') continue;
        if (line[0] == 'p') {
            std::istringstream hs(line);
            std::string p, cnf;
            long nv = 0, nc = 0;
            hs >> p >> cnf >> nv >> nc;
            if (cnf != "cnf") throw std::invalid_argument("bad DIMACS header");
            inst.num_vars = static_cast<int>(nv);
            header = true;
            continue;
        }
        std::istringstream ls(line);
        int lit = 0;
        while (ls >> lit) {
            if (lit == 0) {
                inst.clauses.push_back(current);
                current.clear();
            } else {
                current.push_back(lit);
            }
        }
    }
    if (!header) throw std::invalid_argument("missing DIMACS header");
    if (!current.empty()) throw std::invalid_argument("unterminated clause");
    return inst;
}

std::string default_solver_command() {
    const char* env = std::getenv("PRQ_SAT_SOLVER");
    return env ? std::string(env) : std::string();
}

ProcessResult run_process(const std::string& command, double timeout_s) {
    ProcessResult result;
    int pipefd[2];
    if (pipe(pipefd) != 0) throw std::runtime_error("pipe() failed");
    pid_t pid = fork();
    if (pid < 0) throw std::runtime_error("fork() failed");
    if (pid == 0) {
        close(pipefd[0]);
        dup2(pipefd[1], STDOUT_FILENO);
        close(pipefd[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    close(pipefd[1]);

    auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_s);
    std::string output;
    char buf[4096];
    bool done = false;
    while (!done) {
        auto now = std::chrono::steady_clock::now();
        if (!result.timed_out && now > deadline) {
            kill(pid, SIGKILL);
            result.timed_out = true;
        }
        long wait_ms = result.timed_out
                           ? 1000
                           : std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now)
                                     .count() + 1;
        struct pollfd pfd{pipefd[0], POLLIN, 0};
        int pr = poll(&pfd, 1, static_cast<int>(std::min(wait_ms, 1000L)));
        if (pr > 0) {
            ssize_t got = read(pipefd[0], buf, sizeof(buf));
            if (got > 0)
                output.append(buf, static_cast<size_t>(got));
            else if (got == 0 || errno != EINTR)
                done = true;
        }
    }
    close(pipefd[0]);
    int status = 0;
    waitpid(pid, &status, 0);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    if (WIFSIGNALED(status)) result.signaled = true;
    result.output = std::move(output);
    return result;
}

SolveResult solve_external(const CnfInstance& inst, const std::string& solver_cmd,
                           double timeout_s) {
    SolveResult res;
    if (solver_cmd.empty()) {
        res.kind = SolveResult::Kind::Unknown;
        res.diagnostics = "no solver configured (set PRQ_SAT_SOLVER or --solver)";
        return res;
    }
    char tmpl[] = "/tmp/prq_cnf_XXXXXX";
    int fd = mkstemp(tmpl);
    if (fd < 0) throw std::runtime_error("mkstemp failed");
    close(fd);
    std::string path(tmpl);
    write_dimacs_file(inst, path);

    ProcessResult proc = run_process(solver_cmd + " " + path, timeout_s);
    std::remove(path.c_str());

    if (proc.timed_out) {
        res.kind = SolveResult::Kind::Unknown;
        res.diagnostics = "solver timed out after " + std::to_string(timeout_s) + "s";
        return res;
    }

    std::istringstream is(proc.output);
    std::string line;
    std::string status_line;
    std::vector<int> lits;
    while (std::getline(is, line)) {
        if (line.rfind("s ", 0) == 0) {
            status_line = line.substr(2);
        } else if (line.rfind("v ", 0) == 0) {
            std::istringstream vs(line.substr(2));
            int lit;
            while (vs >> lit)
                if (lit != 0) lits.push_back(lit);
        }
    }
    while (!status_line.empty() && (status_line.back() == '\r' || status_line.back() == ' '))
        status_line.pop_back();

    if (status_line == "SATISFIABLE") {
        res.kind = SolveResult::Kind::Sat;
        res.model.assign(static_cast<size_t>(inst.num_vars) + 1, 0);
        for (int lit : lits) {
            int v = lit > 0 ? lit : -lit;
            if (v < 1 || v > inst.num_vars)
                throw protocol_error("solver model references variable " + std::to_string(v) +
                                     " outside instance");
            res.model[static_cast<size_t>(v)] = lit > 0 ? 1 : -1;
        }
        return res;
    }
    if (status_line == "UNSATISFIABLE") {
        res.kind = SolveResult::Kind::Unsat;
        return res;
    }
    if (proc.signaled || proc.exit_code == 127)
        throw protocol_error("solver crashed or not found (exit " + std::to_string(proc.exit_code) +
                             "): " + solver_cmd);
    res.kind = SolveResult::Kind::Unknown;
    res.diagnostics = "no status line in solver output (exit " + std::to_string(proc.exit_code) +
                      "; " + std::to_string(proc.output.size()) + " bytes)";
    return res;
}

Coloring decode_coloring(const CnfInstance& inst, const std::vector<int>& model) {
    if (static_cast<int>(model.size()) != inst.num_vars + 1)
        throw std::invalid_argument("model size does not match instance");
    // Verify the model satisfies every clause before trusting it.
    for (const auto& clause : inst.clauses) {
        bool satisfied = false;
        for (int lit : clause) {
            int v = lit > 0 ? lit : -lit;
            int val = model[static_cast<size_t>(v)];
            if ((lit > 0 && val > 0) || (lit < 0 && val <= 0)) {
                satisfied = true;
                break;
            }
        }
        if (!satisfied) {
            std::ostringstream os;
            os << "model violates clause (";
            for (int lit : clause) os << lit << " ";
            os << "0)";
            throw std::invalid_argument(os.str());
        }
    }
    std::map<std::string, ColorId> entries;
    for (long n = 1; n <= inst.N; ++n) {
        int assigned = -1;
        for (int c = 0; c < inst.k; ++c) {
            if (model[static_cast<size_t>(inst.var(n, c))] > 0) {
                if (assigned >= 0)
                    throw std::invalid_argument("number " + std::to_string(n) +
                                                " assigned two colors");
                assigned = c;
            }
        }
        if (assigned < 0)
            throw std::invalid_argument("number " + std::to_string(n) + " has no color");
        entries[std::to_string(n)] = assigned;
    }
    return Coloring::table(std::move(entries), 0, Domain::Naturals, inst.k);
}

}  // namespace prq
