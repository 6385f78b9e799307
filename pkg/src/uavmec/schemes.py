"""placeholder - filled in later"""
SolveOptions = SolutionBundle = None
def solve_tdma(*a, **k): raise NotImplementedError
solve_ofdma = solve_one_by_one = solve_noma = solve_propulsion_baseline = solve_tdma
def round_schedule(*a, **k): raise NotImplementedError
