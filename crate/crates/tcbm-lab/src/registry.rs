//! Experiment catalog and the claims each experiment verifies.
//!
//! A *claim* is one quantitative statement about time-changed Brownian
//! motion (an identity, a bound, or a decay rate).  Each claim is owned by
//! exactly one experiment; the `catalog_covers_every_claim_exactly_once`
//! test pins that contract so the catalog cannot silently drop coverage.

/// One verifiable statement, named by its content.
#[derive(Debug, Clone, Copy)]
pub struct ClaimInfo {
    pub key: &'static str,
    pub statement: &'static str,
}

/// A runnable experiment and the claims it verifies.
#[derive(Debug, Clone, Copy)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub summary: &'static str,
    pub claims: &'static [&'static str],
}

/// Every claim the suite verifies, keyed by content.
pub const CLAIMS: &[ClaimInfo] = &[
    ClaimInfo {
        key: "revuz-duality",
        statement: "Duality pairing the clock with its measure: \
                    ∫E_x[∫e^{-αt} f(B_t) dA_t] g(x) dx = ∫E_x[∫e^{-αt} g(B_t) dt] f(x) dμ(x).",
    },
    ClaimInfo {
        key: "clock-support",
        statement: "The additive-functional clock A increases only while the path \
                    occupies the support of its measure.",
    },
    ClaimInfo {
        key: "resolvent-clock-integral",
        statement: "The measure-resolvent V_α f(x) = E_x[∫e^{-αA_t} f(B_t) dA_t] is \
                    computed unbiasedly by the exponential-clock estimator, with \
                    V_α 1 = 1/α and ‖V_α f‖ ≤ ‖f‖/α.",
    },
    ClaimInfo {
        key: "ball-mass-regularity",
        statement: "Each shipped measure satisfies μ(B(x,r)) ≤ K r^κ for r ≤ R and \
                    |x−p| ≤ r, with the declared (κ, K, R).",
    },
    ClaimInfo {
        key: "holder-exponent",
        statement: "Under the ball-mass bound, resolvent differences scale as \
                    |x−y|^{(2−d+κ)∧1−ε}: the fitted log-log slope of the coupled \
                    difference meets the predicted exponent.",
    },
    ClaimInfo {
        key: "green-representation",
        statement: "E_x[A at first exit of U] equals the Green integral \
                    ∫_U g_U(x,y) dμ(y).",
    },
    ClaimInfo {
        key: "log-kernel-plane",
        statement: "In d = 2 the dominating ball kernel is the logarithmic kernel \
                    −(1/π) log s near the diagonal.",
    },
    ClaimInfo {
        key: "interval-kernel",
        statement: "On an interval (a,b) the exit kernel is \
                    2(x∧y − a)(b − x∨y)/(b − a): symmetric, and its Lebesgue \
                    integral is (x−a)(b−x).",
    },
    ClaimInfo {
        key: "zeta-scale",
        statement: "The scale function ζ_d(r,t) (r^t in d=1, −r^t log r in d=2, \
                    r^{2−d+t} in d≥3, monotone on (0,1)) governs Green mass bounds.",
    },
    ClaimInfo {
        key: "exit-mass-bound",
        statement: "E_x[A at first exit of B(x,r)] ≤ C ζ_d(r,κ) with an explicit \
                    constant C built from (d, κ, K).",
    },
    ClaimInfo {
        key: "log-power-domination",
        statement: "−s^a log s ≤ (1/b) s^{a−b} for 0 < b ≤ a and s ∈ (0,1].",
    },
    ClaimInfo {
        key: "exp-reciprocal-max",
        statement: "exp(−c r^{−δ}) ≤ c_δ r on (0,1] for a finite constant c_δ \
                    depending only on (c, δ).",
    },
    ClaimInfo {
        key: "mirror-coupling-construction",
        statement: "The mirror couple is driven by reflected increments \
                    dZ̃ = (I − 2uu^T) dZ until the meeting time, and moves \
                    identically afterwards.",
    },
    ClaimInfo {
        key: "mirror-image-identity",
        statement: "Before the meeting time the mirrored path is the exact mirror \
                    image of the base path across the separating hyperplane, and \
                    its law is Brownian motion from the second start.",
    },
    ClaimInfo {
        key: "clipped-clock-quantities",
        statement: "The clipped clock quantities I = E[A_ξ ∧ 1] and Ĩ = E[Ã_ξ ∧ 1] \
                    lie in [0,1] and swap under exchanging the two starting points.",
    },
    ClaimInfo {
        key: "stopped-distance-moments",
        statement: "E|Z_σ − Z̃_σ|^θ ≤ |x−y|^θ for θ ∈ (0,1] and bounded stopping \
                    rules σ ≤ ξ, with equality at θ = 1 for fixed-time stopping.",
    },
    ClaimInfo {
        key: "meeting-tail",
        statement: "P(ξ > t) = 2Φ(a/√t) − 1 for initial signed distance a, \
                    bounded by |x−y|/√(2πt); the half-width form a/√(2πt) fails \
                    for small a and is flagged, not failed.",
    },
    ClaimInfo {
        key: "gaussian-exit-tail",
        statement: "P(τ_{B(x,r)} ≤ t) ≤ C exp(−r²/(C t)) for a finite fitted C \
                    across an (r,t) grid.",
    },
    ClaimInfo {
        key: "exit-before-meeting",
        statement: "P(the couple leaves B(p, n|x−y|^ε R) before meeting) ≤ \
                    C |x−y|^{1−χ−ε} with the fitted-C bound and matching decay \
                    exponent.",
    },
    ClaimInfo {
        key: "exponent-recursion",
        statement: "The exponent sequence r_0 = 0, r_{n+1} = γ(r_n + 1) with \
                    γ = 2−d+κ matches its closed form γ(γ^n − 1)/(γ − 1), and \
                    q_n = (r_n − εr_{n−1})/(r_n + 1) − ε.",
    },
    ClaimInfo {
        key: "recursion-relation",
        statement: "The one-step improvement identity: q_{n+1} expressed through \
                    η_{n+1} = ((r_n+1)q_n + 1 + εr_n)/(γ(r_n+1) + 1) is consistent \
                    with the direct recursion at every step.",
    },
    ClaimInfo {
        key: "chain-identities",
        statement: "The conjugate-pair chain a_n = (r_n+1)/r_n, b_n = r_n + 1 \
                    satisfies 1/a_n + 1/b_n = 1, a_n q_n ≤ 1, and \
                    q_n ≥ r_n/(r_n+1) − 2ε.",
    },
    ClaimInfo {
        key: "limit-exponent",
        statement: "q_n increases to the limiting Hölder exponent \
                    (γ ∧ 1) − ε (up to any slack δ within finitely many steps), \
                    with r_n → γ/(1−γ) when γ < 1.",
    },
    ClaimInfo {
        key: "difference-decomposition",
        statement: "The coupled pathwise decomposition of V_α f(x) − V_α f(y) \
                    (both discounted clock integrals to ξ plus a shared \
                    continuation weighted by e^{-αA_ξ} − e^{-αÃ_ξ}) agrees with \
                    the independent difference of the two point estimates.",
    },
    ClaimInfo {
        key: "difference-bound",
        statement: "|V_α f(x) − V_α f(y)| ≤ 2(1 + 1/α)(I_{x,y} + Ĩ_{x,y}) for \
                    ‖f‖ ≤ 1.",
    },
];

/// The runnable experiments, in execution order for `verify-all`.
pub const CATALOG: &[ExperimentInfo] = &[
    ExperimentInfo {
        name: "indices",
        summary: "Exact arithmetic of the exponent bookkeeping: recursion vs \
                  closed form, conjugate-pair identities, and convergence to the \
                  limiting Hölder exponent.",
        claims: &[
            "exponent-recursion",
            "recursion-relation",
            "chain-identities",
            "limit-exponent",
        ],
    },
    ExperimentInfo {
        name: "ball-mass",
        summary: "Randomized certification of μ(B(x,r)) ≤ K r^κ for every \
                  shipped measure family, plus a mis-declared-exponent \
                  counterexample.",
        claims: &["ball-mass-regularity"],
    },
    ExperimentInfo {
        name: "green-kernels",
        summary: "Deterministic kernel identities: interval kernel symmetry and \
                  integral, planar log kernel, ζ scale behaviour, and the \
                  elementary log/exponential dominations.",
        claims: &[
            "interval-kernel",
            "log-kernel-plane",
            "zeta-scale",
            "log-power-domination",
            "exp-reciprocal-max",
        ],
    },
    ExperimentInfo {
        name: "green-exit",
        summary: "Exit-clock means against Green integrals: interval clock mean, \
                  ball exit times r²/d, and the C·ζ_d(r,κ) exit-mass bound on an \
                  (x,r) grid for every shipped measure.",
        claims: &["green-representation", "exit-mass-bound"],
    },
    ExperimentInfo {
        name: "clock-support",
        summary: "The clock is flat away from the measure's support and grows on \
                  it; the inverse clock inverts the clock.",
        claims: &["clock-support"],
    },
    ExperimentInfo {
        name: "revuz",
        summary: "Monte Carlo check of the duality pairing the clock with its \
                  measure on a box, both sides with confidence intervals.",
        claims: &["revuz-duality"],
    },
    ExperimentInfo {
        name: "mirror-structure",
        summary: "Pathwise structure of the mirror couple: reflected increments, \
                  exact mirror image, post-meeting identity, marginal law of the \
                  mirrored path, and the clipped clock quantities.",
        claims: &[
            "mirror-coupling-construction",
            "mirror-image-identity",
            "clipped-clock-quantities",
        ],
    },
    ExperimentInfo {
        name: "meeting-tail",
        summary: "Empirical meeting-time tails over an (a,t) grid against the \
                  exact reflection law and both linear-in-distance bounds.",
        claims: &["meeting-tail"],
    },
    ExperimentInfo {
        name: "stopped-moments",
        summary: "E|Z_σ − Z̃_σ|^θ against |x−y|^θ for θ ∈ {1/4, 1/2, 1} and \
                  three stopping rules, including the θ = 1 fixed-time equality.",
        claims: &["stopped-distance-moments"],
    },
    ExperimentInfo {
        name: "exit-before-meeting",
        summary: "Decay of the exit-before-meeting probability in the initial \
                  separation, with the Gaussian exit-tail bound it rests on.",
        claims: &["exit-before-meeting", "gaussian-exit-tail"],
    },
    ExperimentInfo {
        name: "point-resolvent",
        summary: "The exponential-clock estimator of V_α f: exact 1/α for \
                  constant f, an analytic interval value, the sup bound, and \
                  monotonicity in α.",
        claims: &["resolvent-clock-integral"],
    },
    ExperimentInfo {
        name: "variance",
        summary: "The coupled difference estimator agrees with the independent \
                  difference and cuts its variance at small separation.",
        claims: &["difference-decomposition"],
    },
    ExperimentInfo {
        name: "diff-bound",
        summary: "|V_α f(x) − V_α f(y)| ≤ 2(1+1/α)(I+Ĩ) across separations, in \
                  d = 1 Lebesgue and d = 3 radial-power measures.",
        claims: &["difference-bound"],
    },
    ExperimentInfo {
        name: "holder",
        summary: "Fitted log-log slope of the coupled resolvent difference over \
                  dyadic separations against the predicted Hölder exponent, in \
                  d = 3 radial-power and d = 1 Lebesgue.",
        claims: &["holder-exponent"],
    },
];

/// Look up an experiment by name.
pub fn find(name: &str) -> Option<&'static ExperimentInfo> {
    CATALOG.iter().find(|e| e.name == name)
}

/// All experiment names, in `verify-all` execution order.
pub fn experiment_names() -> Vec<&'static str> {
    CATALOG.iter().map(|e| e.name).collect()
}
