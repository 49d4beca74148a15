// dcmzk command line: decide, prove, verify, simulate and audit double
// coset membership proofs.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 parse, 3 resource,
// 4 transport, 5 precondition.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "dcmzk/dcmzk.hpp"

namespace {

using namespace dcmzk;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw ParseError("cannot write " + path);
}

struct SeedOption {
  std::optional<std::uint64_t> value;

  std::uint64_t resolve() const {
    if (value) return *value;
    const auto s = entropy_seed();
    std::cerr << "seed: " << s << "\n";
    return s;
  }
};

Transport parse_transport(const std::string& name) {
  if (name == "lockstep") return Transport::lockstep;
  if (name == "threaded") return Transport::threaded;
  if (name == "forked") return Transport::forked;
  throw ParseError("unknown transport '" + name + "'");
}

struct Options {
  std::string instance;
  std::string graph_b;
  std::string output;
  std::string mode = "atomic";
  std::size_t k = 1;
  std::size_t cap = kDefaultCap;
  SeedOption seed;
  std::string listen;
  std::string connect;
  std::size_t timeout_ms = kDefaultTimeout.count();
  std::string transport = "threaded";
  std::string transcript;
  std::string adversary = "honest";
  std::string cheater = "optimal";
  std::size_t trials = 10'000;
  std::size_t samples = 0;
  std::size_t restart_cap = kDefaultRestartCap;
  bool exact = false;
  bool malformed_rejects = false;
};

PreparedInstance load(const Options& o) { return PreparedInstance(parse_instance(read_file(o.instance))); }

SessionMode session_mode(const Options& o) {
  return SessionMode::parse(o.mode, o.k);
}

std::unique_ptr<Channel> open_channel(const Options& o) {
  if (!o.listen.empty() == !o.connect.empty()) throw ParseError("give exactly one of --listen or --connect");
  const std::chrono::milliseconds timeout(o.timeout_ms);
  return o.listen.empty() ? connect_tcp(o.connect, timeout) : listen_tcp(o.listen, timeout);
}

void emit_transcript(const Options& o, const Transcript& t) {
  if (o.transcript.empty()) return;
  write_file(o.transcript, format_transcript(t));
  std::cout << "transcript: " << o.transcript << "\n";
}

int cmd_solve(const Options& o) {
  const auto p = load(o);
  if (!dcm_decide(p, o.cap)) {
    std::cout << "NO\n";
    return 0;
  }
  const auto f = dcm_factorize(p, o.cap);
  std::cout << "YES\ng0: " << to_string(f.g0) << "\nh0: " << to_string(f.h0) << "\n";
  return 0;
}

int cmd_prove(const Options& o) {
  const auto p = load(o);
  const auto mode = session_mode(o);
  HonestProver prover(p, make_witness(p, o.cap));
  SeededStreams streams(SessionSeeds::from_master(o.seed.resolve()).prover);
  DcmProver party(prover, mode, streams);
  auto channel = open_channel(o);
  run_party(party, *channel);
  std::cout << "verdict: " << (party.last_verdict() ? "ACCEPT" : "REJECT") << "\n";
  return 0;
}

int cmd_verify(const Options& o) {
  const auto p = load(o);
  const auto mode = session_mode(o);
  const auto seeds = SessionSeeds::from_master(o.seed.resolve());
  SeededStreams streams(seeds.verifier);
  HonestChallenges policy(streams);
  DcmVerifier::Options vo;
  vo.malformed_commit_accepts = !o.malformed_rejects;
  DcmVerifier party(p, policy, mode, vo);
  auto channel = open_channel(o);
  run_party(party, *channel);
  auto t = party.transcript();
  t.verifier_seed = seeds.verifier;
  std::cout << "verdict: " << (party.accepted() ? "ACCEPT" : "REJECT") << "\n";
  emit_transcript(o, t);
  return 0;
}

int cmd_run(const Options& o) {
  const auto p = load(o);
  const auto mode = session_mode(o);
  const auto seeds = SessionSeeds::from_master(o.seed.resolve());
  HonestProver prover(p, make_witness(p, o.cap));
  VerifierSetup setup;
  std::optional<VerifierStrategy> adversary;
  if (o.adversary != "honest") {
    adversary = find_adversary(o.adversary);
    setup.adversary = &*adversary;
  }
  setup.options.malformed_commit_accepts = !o.malformed_rejects;
  const auto r = run_dcm_session(p, prover, mode, seeds, parse_transport(o.transport), setup);
  std::cout << "verdict: " << (r.accepted ? "ACCEPT" : "REJECT") << "\n";
  emit_transcript(o, r.transcript);
  if (o.transcript.empty()) std::cout << format_transcript(r.transcript);
  std::cout << "view:\n" << describe(r.view);
  return 0;
}

int cmd_simulate(const Options& o) {
  const auto p = load(o);
  SeededStreams streams(derive_seed(o.seed.resolve(), "simulator"));
  const auto sim = simulate_sequential(p, find_adversary(o.adversary), o.k, streams.stream(0), o.restart_cap, o.cap);
  std::cout << describe(sim.view) << "attempts:";
  for (auto a : sim.attempts_per_stage) std::cout << ' ' << a;
  std::cout << "\n";
  return 0;
}

int cmd_zk_check(const Options& o) {
  const auto p = load(o);
  const bool black_box = o.adversary != "honest" || o.mode == "sequential";
  const auto mode = black_box ? SessionMode::sequential(o.k) : session_mode(o);
  const auto vstar = find_adversary(o.adversary);
  HonestProver prover(p, make_witness(p, o.cap));
  if (o.exact || o.samples == 0) {
    const auto real = exact_interaction_distribution(p, prover, mode, black_box ? &vstar : nullptr);
    const auto sim = black_box ? exact_sequential_simulator_distribution(p, vstar, o.k, o.cap)
                               : exact_honest_simulator_distribution(p, mode, o.cap);
    std::cout << distribution_report(real, &sim);
    return 0;
  }
  const auto master = o.seed.resolve();
  EmpiricalSample real, sim;
  VerifierSetup setup;
  setup.adversary = black_box ? &vstar : nullptr;
  for (std::size_t i = 0; i < o.samples; ++i) {
    real.add(run_dcm_session(p, prover, mode, SessionSeeds::for_trial(master, i), Transport::lockstep, setup)
                 .view.canonical());
    ChaChaSource rng(derive_seed(master, "simulator"), i);
    sim.add(black_box ? simulate_sequential(p, vstar, o.k, rng, o.restart_cap, o.cap).view.canonical()
                      : simulate_honest(p, mode, rng, o.cap).canonical());
  }
  std::cout << "samples: " << o.samples << "\nempirical TV: " << empirical_tv(real, sim) << "\n";
  return 0;
}

int cmd_dcnm_run(const Options& o) {
  const auto p = load(o);
  const auto seeds = SessionSeeds::from_master(o.seed.resolve());
  const auto r = run_dcnm_session(p, honest_dcnm_rule(p, o.cap), o.k, seeds, parse_transport(o.transport));
  std::cout << "verdict: " << (r.accepted ? "ACCEPT" : "REJECT") << "\n";
  emit_transcript(o, r.transcript);
  if (o.transcript.empty()) std::cout << format_transcript(r.transcript);
  std::cout << "view:\n" << describe(r.view);
  return 0;
}

int cmd_dcnm_simulate(const Options& o) {
  const auto p = load(o);
  SeededStreams streams(derive_seed(o.seed.resolve(), "simulator"));
  std::cout << describe(simulate_dcnm_honest(p, streams, o.k, o.cap));
  return 0;
}

int cmd_reduce_gi(const Options& o) {
  const auto a = parse_graph(read_file(o.instance));
  const auto b = parse_graph(read_file(o.graph_b));
  const auto text = format_instance(reduce_gi(a, b));
  if (o.output.empty()) std::cout << text;
  else write_file(o.output, text);
  return 0;
}

int cmd_soundness(const Options& o) {
  if (o.cheater != "optimal") throw ParseError("unknown cheater '" + o.cheater + "'");
  const auto p = load(o);
  const auto mode = session_mode(o);
  OptimalCheatingProver cheater(p, o.cap);
  const auto master = o.seed.resolve();
  const auto r = acceptance_rate(
      [&](std::uint64_t i) {
        return run_dcm_session(p, cheater, mode, SessionSeeds::for_trial(master, i)).accepted;
      },
      o.trials);
  const double expected = std::pow(0.5, static_cast<double>(mode.k));
  std::cout << "mode: " << mode.label() << "\ntrials: " << r.trials << "\naccepted: " << r.accepted
            << "\nrate: " << r.rate << " +/- " << r.half_width << "\nexpected: " << expected << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Zero-knowledge proofs for double coset membership"};
  app.require_subcommand(1);
  Options o;

  auto add_instance = [&](CLI::App* c) { c->add_option("instance", o.instance, "instance file")->required(); };
  auto add_cap = [&](CLI::App* c) { c->add_option("--cap", o.cap, "enumeration cap for the oracle"); };
  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed.value, "master seed (default: OS entropy)"); };
  auto add_session = [&](CLI::App* c) {
    c->add_option("--mode", o.mode, "atomic|sequential|parallel")->check(CLI::IsMember({"atomic", "sequential", "parallel"}));
    c->add_option("--k", o.k, "repetitions");
    add_seed(c);
    add_cap(c);
    c->add_flag("--malformed-rejects", o.malformed_rejects, "reject instead of accept on a malformed commitment");
  };
  auto add_endpoint = [&](CLI::App* c) {
    c->add_option("--listen", o.listen, "host:port to accept one connection on");
    c->add_option("--connect", o.connect, "host:port to connect to");
    c->add_option("--timeout-ms", o.timeout_ms, "connect and read timeout in milliseconds");
  };

  auto* solve = app.add_subcommand("solve", "decide s in GH and print a factorization");
  add_instance(solve);
  add_cap(solve);

  auto* prove = app.add_subcommand("prove", "run the honest prover over TCP");
  add_instance(prove);
  add_session(prove);
  add_endpoint(prove);

  auto* verify = app.add_subcommand("verify", "run the verifier over TCP");
  add_instance(verify);
  add_session(verify);
  add_endpoint(verify);
  verify->add_option("--transcript", o.transcript, "write the transcript here");

  auto* run = app.add_subcommand("run", "run both parties in one process");
  add_instance(run);
  add_session(run);
  run->add_option("--transport", o.transport, "lockstep|threaded|forked");
  run->add_option("--transcript", o.transcript, "write the transcript here");
  run->add_option("--adversary", o.adversary, "verifier strategy (sequential mode)");

  auto* simulate = app.add_subcommand("simulate", "black-box sequential simulator");
  add_instance(simulate);
  simulate->add_option("--k", o.k, "repetitions");
  simulate->add_option("--adversary", o.adversary, "verifier strategy");
  simulate->add_option("--restart-cap", o.restart_cap, "attempts per stage before giving up");
  add_seed(simulate);
  add_cap(simulate);

  auto* zk = app.add_subcommand("zk-check", "compare interaction and simulator view distributions");
  add_instance(zk);
  add_session(zk);
  zk->add_option("--adversary", o.adversary, "verifier strategy; non-honest implies the black-box simulator");
  zk->add_flag("--exact", o.exact, "exact enumeration (default)");
  zk->add_option("--samples", o.samples, "Monte Carlo sample count instead of exact enumeration");
  zk->add_option("--restart-cap", o.restart_cap, "simulator attempts per stage");

  auto* dcnm_run = app.add_subcommand("dcnm-run", "non-membership protocol, both parties in one process");
  add_instance(dcnm_run);
  dcnm_run->add_option("--k", o.k, "repetitions");
  add_seed(dcnm_run);
  add_cap(dcnm_run);
  dcnm_run->add_option("--transport", o.transport, "lockstep|threaded|forked");
  dcnm_run->add_option("--transcript", o.transcript, "write the transcript here");

  auto* dcnm_sim = app.add_subcommand("dcnm-simulate", "non-membership simulator");
  add_instance(dcnm_sim);
  dcnm_sim->add_option("--k", o.k, "repetitions");
  add_seed(dcnm_sim);
  add_cap(dcnm_sim);

  auto* reduce = app.add_subcommand("reduce-gi", "graph isomorphism to double coset membership");
  reduce->add_option("graph-a", o.instance, "first graph file")->required();
  reduce->add_option("graph-b", o.graph_b, "second graph file")->required();
  reduce->add_option("-o,--output", o.output, "instance file to write");

  auto* sound = app.add_subcommand("soundness", "acceptance rate of a cheating prover");
  add_instance(sound);
  add_session(sound);
  sound->add_option("--cheater", o.cheater, "cheating strategy (optimal)");
  sound->add_option("--trials", o.trials, "session count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*solve) return cmd_solve(o);
    if (*prove) return cmd_prove(o);
    if (*verify) return cmd_verify(o);
    if (*run) return cmd_run(o);
    if (*simulate) return cmd_simulate(o);
    if (*zk) return cmd_zk_check(o);
    if (*dcnm_run) return cmd_dcnm_run(o);
    if (*dcnm_sim) return cmd_dcnm_simulate(o);
    if (*reduce) return cmd_reduce_gi(o);
    if (*sound) return cmd_soundness(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
