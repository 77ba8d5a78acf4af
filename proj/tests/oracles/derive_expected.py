# Copyright 2026 The retrosmooth Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent oracles for the frozen expected values in the C++ unit tests.

Everything here is computed by brute force (joint-path enumeration, explicit
matrix products with numpy) and never calls the C++ library. Run with
`python3 tests/oracles/derive_expected.py` and paste the printed values.
"""
import itertools

import numpy as np

np.set_printoptions(precision=17)


def fmt(x):
    return repr(float(x))


# --- classical two-state model -------------------------------------------
D = np.array([[0.9, 0.2], [0.1, 0.8]])  # D[x, x'] = D(x|x')
L = np.array([[0.8, 0.3], [0.2, 0.7]])  # L[y, x] = p(y|x)
prior = np.array([0.5, 0.5])


def path_weight(path, record):
    """p(x_0..x_T, record) with y_k emitted from x_k before the transition."""
    w = prior[path[0]]
    for k, y in enumerate(record):
        w *= L[y, path[k]] * D[path[k + 1], path[k]]
    return w


def marginal_at(record, t):
    probs = np.zeros(2)
    for path in itertools.product(range(2), repeat=len(record) + 1):
        probs[path[t]] += path_weight(path, record)
    return probs


rec = (0, 0, 1)
m = marginal_at(rec, 3)
print("classical filter (0,0,1):", [fmt(v) for v in m / m.sum()], "loglik", fmt(np.log(m.sum())))

# Retrofiltered effect E(x) = p(future | x at start of future).
future = (1, 0)
eff = np.zeros(2)
for x0 in range(2):
    for path in itertools.product(range(2), repeat=len(future)):
        full = (x0,) + path
        w = 1.0
        for k, y in enumerate(future):
            w *= L[y, full[k]] * (D[full[k + 1], full[k]] if k + 1 < len(full) else 1.0)
        # the last transition sums to one over the final state
        eff[x0] += w
print("classical retrofilter (1,0):", [fmt(v) for v in eff])

full_rec = (0, 0, 1, 0)
m = marginal_at(full_rec, 2)
print("classical smooth (0,0,1,0) t=2:", [fmt(v) for v in m / m.sum()])

# --- Petz map on the depolarizing channel --------------------------------
I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
p = 0.5
kraus = [np.sqrt(1 - 3 * p / 4) * I2, np.sqrt(p / 4) * X, np.sqrt(p / 4) * Y, np.sqrt(p / 4) * Z]


def channel(r):
    return sum(k @ r @ k.conj().T for k in kraus)


def adjoint(r):
    return sum(k.conj().T @ r @ k for k in kraus)


def mpow(a, e):
    w, v = np.linalg.eigh(a)
    return v @ np.diag(w ** e) @ v.conj().T


gamma = np.diag([0.75, 0.25]).astype(complex)
sigma = np.diag([1.0, 0.0]).astype(complex)
eg = channel(gamma)
petz = mpow(gamma, 0.5) @ adjoint(mpow(eg, -0.5) @ sigma @ mpow(eg, -0.5)) @ mpow(gamma, 0.5)
print("petz depolarizing:", [fmt(v) for v in np.real(np.diag(petz))], fmt(abs(petz[0, 1])))

# --- PF-smoothed qubit and X-basis counterfactual probabilities ----------
rho_f = np.array([[0.6, 0.2 - 0.1j], [0.2 + 0.1j, 0.4]])
e_r = np.array([[0.9, 0.05j], [-0.05j, 0.3]])
s = mpow(rho_f, 0.5)
rho_s = s @ e_r @ s / np.trace(rho_f @ e_r).real
plus = np.array([1, 1]) / np.sqrt(2)
minus = np.array([1, -1]) / np.sqrt(2)
print("counterfactual X:", fmt(np.real(plus @ rho_s @ plus)), fmt(np.real(minus @ rho_s @ minus)))

# --- scalar entropies ----------------------------------------------------
print("S(diag(3/4,1/4)):", fmt(-0.75 * np.log(0.75) - 0.25 * np.log(0.25)))
print("H(0.9,0.1):", fmt(-0.9 * np.log(0.9) - 0.1 * np.log(0.1)))
