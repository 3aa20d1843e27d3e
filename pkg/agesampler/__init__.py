"""Age-of-information sampling over an unreliable two-way channel:
channel models, waiting-time policies, the online threshold learner,
an offline oracle, a simulator and the analysis surface around them."""
