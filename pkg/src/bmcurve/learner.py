"""Curve search by Q-learning over adjacent cross-dimension bit swaps.

States are curves (one-hot encoded per slot), actions swap two adjacent
slots from different dimensions, and the reward is the normalized drop in
the combined workload cost, evaluated with the constant-time estimators.
The Q-network is a small fully connected net implemented directly in numpy.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .curve import BmcSpec
from .global_cost import GlobalCostAccumulator
from .local_cost import PatternTableSet, combined_cost


class LearnerError(ValueError):
    pass


@dataclass
class LearnerConfig:
    episodes: int = 50
    steps_per_episode: int = 30
    replay_capacity: int = 4096
    batch_size: int = 64
    discount: float = 0.9
    learning_rate: float = 1e-3
    hidden_sizes: tuple[int, ...] = (128, 128)
    epsilon_start: float = 1.0
    epsilon_end: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if min(self.episodes, self.steps_per_episode, self.replay_capacity,
               self.batch_size) < 1:
            raise LearnerError("episodes, steps, capacity, batch must be >= 1")
        for eps in (self.epsilon_start, self.epsilon_end):
            if not 0.0 <= eps <= 1.0:
                raise LearnerError(f"epsilon {eps} outside [0, 1]")
        if self.learning_rate <= 0 or not 0.0 <= self.discount <= 1.0:
            raise LearnerError("bad learning rate or discount")

    @property
    def total_steps(self) -> int:
        return self.episodes * self.steps_per_episode

    def epsilon_at(self, step: int) -> float:
        """Linear anneal from epsilon_start to epsilon_end over the first half."""
        horizon = max(self.total_steps // 2, 1)
        frac = min(step / horizon, 1.0)
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)


def encode_state(spec: BmcSpec) -> np.ndarray:
    """One-hot per slot, most significant slot first; length d*l*d."""
    eye = np.eye(spec.d)
    return np.concatenate([eye[dim] for dim in reversed(spec.slots)])


def decode_state(vec: np.ndarray, d: int, l: int) -> BmcSpec:
    dims_msb = vec.reshape(d * l, d).argmax(axis=1)
    return BmcSpec(d, l, tuple(int(x) for x in reversed(dims_msb)))


def valid_actions(spec: BmcSpec) -> list[int]:
    """Swap positions a (1-indexed from the least significant slot) whose two
    slots belong to different dimensions."""
    return [
        a
        for a in range(1, spec.total_bits)
        if spec.slots[a - 1] != spec.slots[a]
    ]


def apply_swap(spec: BmcSpec, a: int) -> BmcSpec:
    """Swap slots at positions a and a+1 (1-indexed from the LSB)."""
    if not 1 <= a <= spec.total_bits - 1:
        raise LearnerError(f"swap position {a} outside [1, {spec.total_bits - 1}]")
    if spec.slots[a - 1] == spec.slots[a]:
        raise LearnerError(f"slots {a} and {a + 1} belong to the same dimension")
    slots = list(spec.slots)
    slots[a - 1], slots[a] = slots[a], slots[a - 1]
    return BmcSpec(spec.d, spec.l, tuple(slots))


def reward(cost_prev: int, cost_next: int, cost_initial: int) -> float:
    """Normalized cost reduction of one swap."""
    if cost_initial <= 0:
        raise LearnerError("initial cost must be positive")
    return (cost_prev - cost_next) / cost_initial


class QNetwork:
    """Fully connected ReLU net mapping encoded states to action values."""

    def __init__(self, in_dim, out_dim, hidden_sizes, rng):
        sizes = [in_dim, *hidden_sizes, out_dim]
        self.weights = []
        self.biases = []
        for a, b in zip(sizes[:-1], sizes[1:]):
            self.weights.append(rng.normal(0.0, np.sqrt(2.0 / a), size=(a, b)))
            self.biases.append(np.zeros(b))

    @property
    def params(self):
        return self.weights + self.biases

    def forward(self, x: np.ndarray) -> np.ndarray:
        """x: (batch, in_dim) -> (batch, out_dim)."""
        h = x
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w + b, 0.0)
        return h @ self.weights[-1] + self.biases[-1]

    def loss(self, states, actions, targets) -> float:
        q = self.forward(states)[np.arange(len(actions)), actions]
        return float(np.mean((targets - q) ** 2))

    def loss_and_grads(self, states, actions, targets):
        """Mean squared TD error on the selected actions, with gradients."""
        acts = [states]
        pre = []
        h = states
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            z = h @ w + b
            pre.append(z)
            h = np.maximum(z, 0.0)
            acts.append(h)
        out = h @ self.weights[-1] + self.biases[-1]

        batch = len(actions)
        idx = np.arange(batch)
        q = out[idx, actions]
        err = q - targets
        loss = float(np.mean(err**2))

        d_out = np.zeros_like(out)
        d_out[idx, actions] = 2.0 * err / batch
        gw = [None] * len(self.weights)
        gb = [None] * len(self.biases)
        delta = d_out
        for layer in range(len(self.weights) - 1, -1, -1):
            gw[layer] = acts[layer].T @ delta
            gb[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights[layer].T) * (pre[layer - 1] > 0.0)
        return loss, gw + gb

    def sgd_step(self, grads, lr: float) -> None:
        for p, g in zip(self.params, grads):
            p -= lr * g


def masked_argmax(q_values: np.ndarray, actions: list[int]) -> int:
    """Best action among the valid ones; q_values indexed by action-1."""
    best = max(actions, key=lambda a: q_values[a - 1])
    return best


def train_step(memory, net: QNetwork, config: LearnerConfig, rng) -> float:
    """One gradient step on a sampled batch; returns the batch loss."""
    if len(memory) == 0:
        raise LearnerError("replay memory is empty")
    batch = min(config.batch_size, len(memory))
    sample = [memory[i] for i in rng.choice(len(memory), size=batch, replace=False)]
    states = np.stack([t[0] for t in sample])
    actions = np.array([t[1] - 1 for t in sample])
    rewards = np.array([t[2] for t in sample])
    next_states = np.stack([t[3] for t in sample])
    next_actions = [t[4] for t in sample]

    if config.discount > 0.0:
        next_q = net.forward(next_states)
        best_next = np.array(
            [max(next_q[i, a - 1] for a in next_actions[i]) for i in range(batch)]
        )
        targets = rewards + config.discount * best_next
    else:
        targets = rewards
    loss, grads = net.loss_and_grads(states, actions, targets)
    net.sgd_step(grads, config.learning_rate)
    return loss


@dataclass
class StepRecord:
    step: int
    episode: int
    epsilon: float
    action: int
    cost: int
    ratio: float
    loss: float


@dataclass
class LearnResult:
    best_spec: BmcSpec
    best_cost: int
    initial_cost: int
    history: list[StepRecord] = field(default_factory=list)


def learn_bmc(
    sigma1: BmcSpec,
    tables: PatternTableSet,
    acc: GlobalCostAccumulator,
    config: LearnerConfig,
) -> LearnResult:
    """Run the swap-search; returns the lowest-cost curve ever visited.

    With a fixed seed the whole run (trace, weights, output) is reproducible.
    """
    rng = np.random.default_rng(config.seed)
    d, l = sigma1.d, sigma1.l
    n_actions = d * l - 1
    net = QNetwork(d * l * d, n_actions, config.hidden_sizes, rng)
    memory: deque = deque(maxlen=config.replay_capacity)

    def score(spec):
        return combined_cost(spec, acc, tables)

    initial_cost = score(sigma1)
    best_spec, best_cost = sigma1, initial_cost
    history: list[StepRecord] = []
    cost_cache: dict[tuple, int] = {sigma1.slots: initial_cost}

    step = 0
    for episode in range(config.episodes):
        spec = sigma1
        cost = initial_cost
        state = encode_state(spec)
        for _ in range(config.steps_per_episode):
            eps = config.epsilon_at(step)
            actions = valid_actions(spec)
            if rng.random() < eps:
                a = actions[rng.integers(len(actions))]
            else:
                a = masked_argmax(net.forward(state[None])[0], actions)
            nxt = apply_swap(spec, a)
            if nxt.slots in cost_cache:
                nxt_cost = cost_cache[nxt.slots]
            else:
                nxt_cost = score(nxt)
                cost_cache[nxt.slots] = nxt_cost
            r = reward(cost, nxt_cost, initial_cost)
            nxt_state = encode_state(nxt)
            memory.append((state, a, r, nxt_state, valid_actions(nxt)))
            loss = train_step(memory, net, config, rng)
            if nxt_cost < best_cost:
                best_spec, best_cost = nxt, nxt_cost
            spec, cost, state = nxt, nxt_cost, nxt_state
            step += 1
            history.append(
                StepRecord(step, episode + 1, eps, a, cost, cost / initial_cost, loss)
            )
    return LearnResult(best_spec, best_cost, initial_cost, history)
