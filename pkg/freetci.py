#***********************************************************************
# FREETCI COMMAND LINE
#***********************************************************************
#
# Subcommands: tci, equilibrium, w2, pressure, gas, sk, pl-circle,
# sun-check and suite.
#
# Exit codes: 0 pass, 1 inequality violation, 2 usage or scenario error,
# 3 numerical failure.
#
#***********************************************************************

# Python Imports
import sys
import logging
import functools

# Data science imports
import click

# Project Imports
from src.circle_core import Potential
from src.circle_core import load_measure
from src.circle_core import load_potential
from src.coulomb_gas import ChainConfig
from src.errors import FreeTciError
from src.errors import ScenarioError
from src.harness import OUTPUT_FORMATS
from src.harness import make_report
from src.harness import run_equilibrium
from src.harness import run_gas
from src.harness import run_pl_circle
from src.harness import run_pressure
from src.harness import run_sk
from src.harness import run_sun_check
from src.harness import run_tci
from src.harness import run_w2
from src.harness import write_report
from src.suites import SUITES
from src.suites import run_suite

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_VIOLATION = 1
EXIT_NUMERIC = 3

SEED = click.IntRange(0, 2 ** 64 - 1)

#-----------------------------------------------------------------------
# Shared options and error handling
#-----------------------------------------------------------------------

def output_options (fn):
    fn = click.option('--format', 'fmt', type=click.Choice(OUTPUT_FORMATS), default='json',
                      help='Report format.')(fn)
    fn = click.option('--out', type=click.Path(dir_okay=False), default=None,
                      help='Write the report here instead of stdout.')(fn)
    return fn

#-----------------------------------------------------------------------

def potential_options (fn):
    fn = click.option('--constant', type=float, default=0.0, help='Constant term of Q.')(fn)
    fn = click.option('--sin', 'sin', type=float, multiple=True, help='Sine coefficients of Q.')(fn)
    fn = click.option('--cos', 'cos', type=float, multiple=True, help='Cosine coefficients of Q.')(fn)
    fn = click.option('--potential', type=click.Path(exists=True, dir_okay=False), default=None,
                      help='Potential file (.json or .csv) instead of coefficients.')(fn)
    fn = click.option('--grid', type=click.IntRange(8), default=256, help='Grid size n.')(fn)
    return fn

#-----------------------------------------------------------------------

def make_potential (grid, potential, cos, sin, constant):
    if potential is not None:
        return load_potential(potential)
    return Potential.from_modes(grid, cos=list(cos), sin=list(sin), constant=constant)

#-----------------------------------------------------------------------

# ScenarioError is a usage error (exit 2); any other lab error is a
# numerical failure (exit 3).

def lab_errors (fn):
    @functools.wraps(fn)
    def wrapper (*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ScenarioError as e:
            raise click.UsageError(str(e))
        except FreeTciError as e:
            logger.error("%s: %s", type(e).__name__, e)
            sys.exit(EXIT_NUMERIC)
    return wrapper

#-----------------------------------------------------------------------

def finish (command, report, out, fmt):
    document = make_report(command, report)
    text = write_report(document, out, fmt)
    if out is None:
        click.echo(text)
    if not report.get('passed', True):
        failures = report.get('failures')
        if failures:
            logger.error("Violations in: %s", ', '.join(failures))
        sys.exit(EXIT_VIOLATION)
    sys.exit(EXIT_PASS)

#***********************************************************************
# Commands
#***********************************************************************

@click.group()
@click.option('--verbose', is_flag=True, help='Log at DEBUG level.')
def cli (verbose):
    logging.basicConfig(format='%(asctime)s : %(levelname)s : %(message)s',
                        level=logging.DEBUG if verbose else logging.INFO)

#-----------------------------------------------------------------------

@cli.command()
@click.option('--scenario', required=True, help='Scenario file or bundled scenario name.')
@click.option('--workers', type=click.IntRange(1), default=1, help='Process pool size.')
@output_options
@lab_errors
def tci (scenario, workers, out, fmt):
    """Free transportation cost inequality over a scenario matrix."""
    finish('tci', run_tci(scenario, workers), out, fmt)

#-----------------------------------------------------------------------

@cli.command()
@potential_options
@click.option('--stage', type=click.Choice(['auto', 'spectral', 'simplex']), default='auto')
@output_options
@lab_errors
def equilibrium (grid, potential, cos, sin, constant, stage, out, fmt):
    """Equilibrium measure and B(Q) of a potential."""
    Q = make_potential(grid, potential, cos, sin, constant)
    finish('equilibrium', run_equilibrium(Q, stage), out, fmt)

#-----------------------------------------------------------------------

@cli.command()
@click.option('--source', required=True, type=click.Path(exists=True, dir_okay=False))
@click.option('--target', required=True, type=click.Path(exists=True, dir_okay=False))
@output_options
@lab_errors
def w2 (source, target, out, fmt):
    """Circular quadratic Wasserstein distance between two measure files."""
    finish('w2', run_w2(load_measure(source), load_measure(target)), out, fmt)

#-----------------------------------------------------------------------

@cli.command()
@potential_options
@click.option('--f-cos', type=float, multiple=True, help='Cosine coefficients of f.')
@click.option('--f-sin', type=float, multiple=True, help='Sine coefficients of f.')
@click.option('-N', 'sizes', type=click.IntRange(2), multiple=True, default=(8, 16, 32))
@click.option('--steps', type=click.IntRange(1), default=200000)
@click.option('--burn-in', type=click.IntRange(0), default=20000)
@click.option('--thin', type=click.IntRange(1), default=4)
@click.option('--width', type=float, default=0.5, help='Proposal width in radians.')
@click.option('--s-grid', type=click.IntRange(3), default=11)
@click.option('--seed', type=SEED, default=0)
@click.option('--workers', type=click.IntRange(1), default=1)
@output_options
@lab_errors
def pressure (grid, potential, cos, sin, constant, f_cos, f_sin, sizes, steps, burn_in, thin,
              width, s_grid, seed, workers, out, fmt):
    """Free pressure by thermodynamic integration against the exact value."""
    Q = make_potential(grid, potential, cos, sin, constant)
    f = Potential.from_modes(Q.n_grid, cos=list(f_cos), sin=list(f_sin))
    config = ChainConfig(steps=steps, burn_in=burn_in, thin=thin, proposal_width=width, seed=seed)
    finish('pressure', run_pressure(Q, f, list(sizes), config, s_grid, workers), out, fmt)

#-----------------------------------------------------------------------

@cli.command()
@potential_options
@click.option('-N', 'size', type=click.IntRange(2), default=8)
@click.option('--steps', type=click.IntRange(1), default=100000)
@click.option('--burn-in', type=click.IntRange(0), default=10000)
@click.option('--thin', type=click.IntRange(1), default=10)
@click.option('--width', type=float, default=0.5, help='Proposal width in radians.')
@click.option('--seed', type=SEED, default=0)
@click.option('--trace', type=click.Path(dir_okay=False), default=None, help='Chain trace CSV.')
@output_options
@lab_errors
def gas (grid, potential, cos, sin, constant, size, steps, burn_in, thin, width, seed, trace, out, fmt):
    """Sample the Coulomb gas and report its mean empirical measure."""
    Q = make_potential(grid, potential, cos, sin, constant)
    config = ChainConfig(steps=steps, burn_in=burn_in, thin=thin, proposal_width=width, seed=seed)
    finish('gas', run_gas(Q, size, config, trace), out, fmt)

#-----------------------------------------------------------------------

@cli.command()
@click.option('--full', is_flag=True, help='Acceptance scale sweep.')
@output_options
@lab_errors
def sk (full, out, fmt):
    """Sweep Phi_theta against its quadratic bound."""
    thetas = [0.1 * k for k in range(1, 10)] if full else [0.25, 0.5, 0.75]
    report = run_sk(range(2, 17), (0.5, 1.0, 2.0), thetas, 25 if full else 12)
    finish('sk', report, out, fmt)

#-----------------------------------------------------------------------

@cli.command('pl-circle')
@click.option('--grid', type=click.IntRange(8), default=64)
@click.option('--pairs', type=click.IntRange(1), default=10)
@click.option('--seed', type=SEED, default=0)
@click.option('--order', type=click.Choice(['consistent', 'printed']), default='consistent')
@output_options
@lab_errors
def pl_circle (grid, pairs, seed, order, out, fmt):
    """Brute force Prekopa-Leindler on the circle for random pairs."""
    finish('pl-circle', run_pl_circle(grid, pairs, (0.25, 0.5, 0.75), seed, order), out, fmt)

#-----------------------------------------------------------------------

@cli.command('sun-check')
@click.option('-N', 'sizes', type=click.IntRange(2), multiple=True, default=(2, 3, 4, 5, 6))
@click.option('--trials', type=click.IntRange(1), default=100)
@click.option('--seed', type=SEED, default=0)
@output_options
@lab_errors
def sun_check (sizes, trials, seed, out, fmt):
    """Matrix to eigenvalue contraction on random SU(N) pairs."""
    finish('sun-check', run_sun_check(list(sizes), trials, seed), out, fmt)

#-----------------------------------------------------------------------

@cli.command()
@click.argument('name', type=click.Choice(sorted(SUITES)))
@click.option('--full', is_flag=True, help='Acceptance scale sizes.')
@click.option('--seed', type=SEED, default=0)
@click.option('--workers', type=click.IntRange(1), default=1)
@output_options
@lab_errors
def suite (name, full, seed, workers, out, fmt):
    """Run the invariant suite of one module."""
    finish('suite ' + name, run_suite(name, full, seed, workers), out, fmt)

#-----------------------------------------------------------------------

if __name__ == '__main__':
    cli()

#-----------------------------------------------------------------------
# End of File
#-----------------------------------------------------------------------
