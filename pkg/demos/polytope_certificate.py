"""Certify the joint spectral radius with a finitely generated prenorm."""
from conejsr import AlgoConfig, run_polytope, verify_certificate
from conejsr.families import linear_pair, power_mean_pair

for name, F in (("linear pair", linear_pair()), ("power-mean pair", power_mean_pair())):
    cert = run_polytope(F, [0, 1])
    ok, rep = verify_certificate(F, cert)
    print(f"{name}: {cert.status} alpha={cert.alpha:.15f} vertices={len(cert.vertices)} "
          f"rounds={cert.rounds} verified={ok}")
    for r, members in enumerate(cert.round_members):
        for j in members:
            word = [i + 1 for i in cert.prenorm.generator_words[j]]
            print(f"  round {r}: z={cert.vertices[j]} from {word}")

# Starting from a poor candidate, a strict witness triggers an SMP update.
cert = run_polytope(linear_pair(), [0, 0, 1, 1, 1], cfg=AlgoConfig(extended_smp_update=True))
print("started from [1,1,2,2,2]:", cert.status, "final word", [i + 1 for i in cert.smp_word],
      "alpha", cert.alpha)
