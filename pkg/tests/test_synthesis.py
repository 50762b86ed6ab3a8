import pytest

from lff.solve import solve_sequential
from lff.synthesis import (ELEMENTS, MAX_LEN, N_NEG, N_POS, TASKS, evens, gen_synthesis_task,
                           ground_truth, is_sorted, reference_solution)
from lff.taskfile import dump_task
from lff.tester import test_hypothesis


def _lists(e):
    return [a for a in e.args if isinstance(a, tuple)]


@pytest.mark.parametrize("name", TASKS)
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_protocol(name, seed):
    task = gen_synthesis_task(name, seed)
    assert len(task.pos) == N_POS == 10 and len(task.neg) == N_NEG == 10
    for e in task.pos + task.neg:
        for xs in _lists(e):
            assert len(xs) <= MAX_LEN
            assert all(ELEMENTS[0] <= x <= ELEMENTS[1] for x in xs)
    assert all(ground_truth(name, e.args) for e in task.pos)
    assert not any(ground_truth(name, e.args) for e in task.neg)


def test_filter_and_sorted_positives():
    for e in gen_synthesis_task("filter", 3).pos:
        xs, ys = e.args
        assert ys == evens(xs) and all(y % 2 == 0 for y in ys)
    for e in gen_synthesis_task("sorted", 3).pos:
        assert is_sorted(e.args[0])
    for e in gen_synthesis_task("sorted", 3).neg:
        assert not is_sorted(e.args[0])


@pytest.mark.parametrize("name", TASKS)
def test_generation_is_deterministic(name):
    assert dump_task(gen_synthesis_task(name, 5)) == dump_task(gen_synthesis_task(name, 5))
    assert dump_task(gen_synthesis_task(name, 5)) != dump_task(gen_synthesis_task(name, 6))


@pytest.mark.parametrize("name", TASKS)
def test_reference_solution_solves_several_seeds(name):
    h = reference_solution(name)
    for seed in range(4):
        task = gen_synthesis_task(name, seed)
        out = test_hypothesis(h, task.bk, task.pos, task.neg, task.limits,
                              directions=dict(task.bias.directions))
        assert out.is_solution, (name, seed)


def test_unknown_task():
    with pytest.raises(ValueError):
        gen_synthesis_task("reverse")


def test_find_dupl_is_learned():
    task = gen_synthesis_task("find_dupl", 0, timeout=120)
    res = solve_sequential(task)
    assert res.solution is not None and res.cost == 7
    out = test_hypothesis(res.solution, task.bk, task.pos, task.neg, task.limits,
                          directions=dict(task.bias.directions))
    assert out.is_solution
