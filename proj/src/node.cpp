#include "tdcosim/error.hpp"
#include "tdcosim/wire.hpp"

namespace tdcosim::wire {

namespace {

template <class T>
T expect(Message m, const char* what)
{
    if (auto* v = std::get_if<T>(&m)) return *v;
    throw Error(Errc::protocol, std::string("expected ") + what);
}

void fail(RunTrace& trace, const Error& e)
{
    trace.ok = false;
    trace.error = e.what();
}

} // namespace

RunTrace run_tx_node(const ScenarioConfig& cfg, Session& session)
{
    validate(cfg);
    const Handshake ours = handshake_for(cfg);
    session.send(ours);
    check_handshake(ours, expect<Handshake>(session.receive(), "handshake"));

    RunTrace trace;
    const long long steps = coarse_steps(cfg);
    trace.coarse.reserve(static_cast<std::size_t>(steps));
    TransmissionNode tx(cfg);
    double t_last = 0.0;
    try {
        TxToDx msg = tx.start(&trace);
        for (long long k = 0;; ++k) {
            t_last = msg.t;
            session.send(msg);
            const DxToTx reply = expect<DxToTx>(session.receive(), "feedback");
            if (reply.t != msg.t) throw Error(Errc::protocol, "feedback timestamp does not match the exchange");
            if (k + 1 >= steps) break;
            msg = tx.advance({reply.p_kw, reply.q_kvar, reply.p_avail_kw}, &trace);
        }
        session.send(End{t_last});
    } catch (const Error& e) {
        if (e.code() != Errc::collapse && e.code() != Errc::io && e.code() != Errc::protocol) throw;
        fail(trace, e);
        if (e.code() == Errc::collapse) {
            try {
                session.send(End{t_last});
            } catch (const Error&) {
            }
        }
    }
    return trace;
}

RunTrace run_dx_node(const ScenarioConfig& cfg, Session& session)
{
    validate(cfg);
    const Handshake ours = handshake_for(cfg);
    const Handshake theirs = expect<Handshake>(session.receive(), "handshake");
    session.send(ours);
    check_handshake(ours, theirs);

    RunTrace trace;
    const int ratio = timestep_ratio(cfg.t_t, cfg.t_d);
    trace.fine.n_plants = static_cast<int>(cfg.distribution.plants.size());
    trace.fine.reserve(static_cast<std::size_t>(coarse_steps(cfg)) * static_cast<std::size_t>(ratio));
    DistributionNode dx(cfg);
    try {
        for (;;) {
            const Message m = session.receive();
            if (std::holds_alternative<End>(m)) break;
            const TxToDx msg = expect<TxToDx>(m, "boundary sample");
            const Feedback fb = dx.process(msg, &trace);
            session.send(DxToTx{msg.t, fb.p_kw, fb.q_kvar, fb.p_avail_kw});
        }
    } catch (const Error& e) {
        if (e.code() != Errc::io && e.code() != Errc::protocol) throw;
        fail(trace, e);
    }
    return trace;
}

} // namespace tdcosim::wire
