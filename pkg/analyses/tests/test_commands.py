import hashlib
import json
import math
import tempfile
from contextlib import redirect_stderr
from io import StringIO
from pathlib import Path

from django.core.management import call_command, load_command_class
from django.core.management.base import CommandError
from django.test import TestCase, override_settings

from analyses.datasets import read_dataset
from analyses.models import RunRecord
from quantum.gaussian import Resolution, fluctuation_ratio, jump_probability


class CommandTestCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.root = Path(self.tmp.name)
        override = override_settings(QNDLAB_OUTPUT_DIR=self.root)
        override.enable()
        self.addCleanup(override.disable)

    def run_command(self, name, **options):
        out, err = StringIO(), StringIO()
        call_command(name, stdout=out, stderr=err, **options)
        return out.getvalue()

    def assertExitCode(self, code, name, **options):
        with self.assertRaises(CommandError) as ctx:
            self.run_command(name, **options)
        self.assertEqual(ctx.exception.returncode, code)
        return str(ctx.exception)


class DistributionsCommandTests(CommandTestCase):

    def test_default_run(self):
        output = self.run_command('distributions')
        path = self.root / 'distributions.csv'
        self.assertIn(str(path), output)
        metadata, columns, rows = read_dataset(path)
        self.assertEqual(columns, ['x_m', 'P', 'P0', 'PQJ'])
        results = metadata['results']
        self.assertAlmostEqual(results['jump_probability'], 0.0572, delta=1e-4)
        self.assertAlmostEqual(results['conditional_second_moment'], 3.3107, delta=1e-4)
        self.assertAlmostEqual(results['fluctuation_ratio'], 2.6485, delta=1e-3)
        self.assertAlmostEqual(results['peak_location'], 1.4937, delta=1e-3)
        self.assertAlmostEqual(results['grid_peak_location'], 1.49, delta=0.01)
        self.assertAlmostEqual(
            results['integrated_jump_probability'],
            results['jump_probability'], delta=1e-8,
        )
        for row in rows:
            total, zero, jump = (float(v) for v in row[1:])
            self.assertGreaterEqual(jump, -1e-15)
            self.assertAlmostEqual(total, zero + jump, delta=1e-15)

    def test_rerun_is_byte_identical(self):
        first = self.root / 'a.csv'
        second = self.root / 'b.csv'
        self.run_command('distributions', dx='0.5', out=str(first))
        self.run_command('distributions', dx='0.5', out=str(second))
        self.assertEqual(first.read_bytes(), second.read_bytes())

    def test_json_format(self):
        self.run_command('distributions', dx='0.2', grid_span='4',
                         grid_step='0.5', format='json')
        document = json.loads((self.root / 'distributions.json').read_text())
        self.assertEqual(len(document['rows']), 17)
        self.assertEqual(document['metadata']['parameters']['dx'], 0.2)
        self.assertEqual(set(document['rows'][0]), {'x_m', 'P', 'P0', 'PQJ'})

    def test_invalid_resolution(self):
        message = self.assertExitCode(1, 'distributions', dx='0')
        self.assertIn('dx', message)
        record = RunRecord.objects.get()
        self.assertEqual(record.status, 'invalid')
        self.assertEqual(record.exit_code, 1)

    def test_narrow_grid_is_a_validation_error(self):
        message = self.assertExitCode(1, 'distributions', grid_span='2')
        self.assertIn('GridCoverageError', message)

    def test_unwritable_output(self):
        blocker = self.root / 'blocker'
        blocker.write_text('')
        self.assertExitCode(3, 'distributions', out=str(blocker / 'x.csv'))
        self.assertEqual(RunRecord.objects.get().status, 'io_error')

    def test_missing_config_file(self):
        self.assertExitCode(3, 'distributions',
                            config=str(self.root / 'absent.json'))

    def test_ledger_records_checksum(self):
        self.run_command('distributions', dx='3')
        record = RunRecord.objects.get()
        self.assertEqual(record.status, 'success')
        self.assertEqual(record.command, 'distributions')
        self.assertEqual(record.parameters['dx'], 3.0)
        path = Path(record.output_path)
        self.assertEqual(
            record.checksum, hashlib.sha256(path.read_bytes()).hexdigest()
        )


class PostStateCommandTests(CommandTestCase):

    def test_ellipses_and_fock_agreement(self):
        self.run_command('poststate', dx='0.5', x_m='-0.5', format='json')
        document = json.loads((self.root / 'poststate.json').read_text())
        results = document['metadata']['results']
        self.assertAlmostEqual(results['post']['center_x'], -0.25)
        self.assertAlmostEqual(results['squeeze_ratio_x'], 2 ** -0.5)
        self.assertAlmostEqual(results['squeeze_ratio_y'], 2 ** 0.5)
        self.assertAlmostEqual(results['fock_post_mean_x'], -0.25, delta=1e-8)
        self.assertAlmostEqual(results['fock_post_var_x'], 0.125, delta=1e-8)
        self.assertEqual(results['operator_warnings'], [])
        curves = {row['curve'] for row in document['rows']}
        self.assertEqual(curves, {'pre', 'post'})
        self.assertEqual(len(document['rows']), 2 * 181)


class OrderingCommandTests(CommandTestCase):

    def test_identity_table(self):
        self.run_command('ordering', dim='32', format='json')
        document = json.loads((self.root / 'ordering.json').read_text())
        results = document['metadata']['results']
        self.assertTrue(results['passed'])
        self.assertAlmostEqual(results['vacuum_xnx'], 0.25, delta=1e-12)
        self.assertEqual(len(document['rows']), 25)


class OracleCheckCommandTests(CommandTestCase):

    def test_defaults_pass(self):
        self.run_command('oracle_check')
        metadata, _, rows = read_dataset(self.root / 'oracle_check.csv')
        self.assertTrue(metadata['results']['passed'])
        self.assertEqual(metadata['results']['checks'], 14)
        self.assertTrue(all(row[3] == 'True' for row in rows))
        detail = {row[0]: row[4] for row in rows}['vacuum_ordering']
        self.assertEqual(detail, 'xnx=0.2500')

    def test_undersized_meter_fails_verification(self):
        message = self.assertExitCode(2, 'oracle_check', dx='0.25')
        self.assertIn('coupling_unitarity', message)
        metadata, _, rows = read_dataset(self.root / 'oracle_check.csv')
        self.assertIn('coupling_unitarity', metadata['results']['failed_checks'])
        detail = {row[0]: row[4] for row in rows}['coupling_unitarity']
        self.assertIn('>= 64', detail)
        self.assertEqual(RunRecord.objects.get().status, 'failed')


class MonteCarloCommandTests(CommandTestCase):

    def test_jump_stats(self):
        self.run_command('jump_stats', trials='40000', seed='5', format='json')
        document = json.loads((self.root / 'jump_stats.json').read_text())
        rows = {row['quantity']: row for row in document['rows']}
        res = Resolution(1.0)
        fraction = rows['jump_fraction']
        self.assertEqual(fraction['closed_form'], jump_probability(res))
        self.assertLessEqual(
            abs(fraction['estimate'] - jump_probability(res)),
            4 * fraction['std_error'],
        )
        self.assertEqual(rows['conditional_ratio']['closed_form'],
                         fluctuation_ratio(res))
        self.assertGreater(document['metadata']['results']['detected_events'], 30)

    def test_mc_for_coherent_input(self):
        self.run_command('mc', state='coherent:1', trials='20000', format='json')
        document = json.loads((self.root / 'mc.json').read_text())
        results = document['metadata']['results']
        self.assertEqual(results['state'], 'coherent:1')
        self.assertAlmostEqual(results['phase_space_correlation'], 1.125)
        self.assertEqual(document['metadata']['parameters']['state'], 'coherent:1')

    def test_small_correlation_sweep(self):
        self.run_command('correlation', sweep='0.5,2', trials='4000')
        metadata, columns, rows = read_dataset(self.root / 'correlation.csv')
        self.assertEqual(columns[:3], ['dx', 'analytic_C', 'fock_C'])
        self.assertEqual(len(rows), 2)
        for row in rows:
            self.assertAlmostEqual(float(row[1]), 0.125, delta=1e-9)
            self.assertAlmostEqual(float(row[2]), 0.125, delta=1e-6)
        self.assertEqual(metadata['results']['rows'], 2)

    def test_bad_state_descriptor(self):
        message = self.assertExitCode(1, 'mc', state='thermal:2')
        self.assertIn('state', message)

    def test_workers_do_not_change_output(self):
        first = self.root / 'serial.csv'
        second = self.root / 'threaded.csv'
        self.run_command('mc', trials='4000', streams='4', out=str(first))
        self.run_command('mc', trials='4000', streams='4', workers='4',
                         out=str(second))
        self.assertEqual(first.read_bytes(), second.read_bytes())


class UsageErrorTests(CommandTestCase):

    def test_command_line_usage_error_exits_with_validation_code(self):
        command = load_command_class('analyses', 'distributions')
        with redirect_stderr(StringIO()) as err:
            with self.assertRaises(SystemExit) as ctx:
                command.run_from_argv(['manage.py', 'distributions', '--bogus'])
        self.assertEqual(ctx.exception.code, 1)
        self.assertIn('unrecognized arguments', err.getvalue())
        self.assertFalse(RunRecord.objects.exists())

    def test_called_usage_error_is_validation_error(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('runs', '--limit', 'many', stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, 1)


class RunsCommandTests(CommandTestCase):

    def test_lists_recent_runs(self):
        self.assertIn('No runs recorded', self.run_command('runs'))
        self.run_command('ordering', dim='16')
        self.assertExitCode(1, 'distributions', dx='-2')
        output = self.run_command('runs')
        self.assertIn('ordering', output)
        self.assertIn('distributions', output)
        filtered = self.run_command('runs', run_command='ordering', limit=5)
        self.assertNotIn('distributions', filtered)


class DatasetContentTests(CommandTestCase):

    def test_outcome_column_is_gaussian(self):
        self.run_command('distributions', dx='0.5', grid_span='5',
                         grid_step='0.1')
        _, _, rows = read_dataset(self.root / 'distributions.csv')
        for row in rows:
            x_m, total = float(row[0]), float(row[1])
            expected = math.exp(-x_m ** 2) / math.sqrt(math.pi)
            self.assertAlmostEqual(total, expected, delta=1e-9)

    def test_weak_readout_leaves_vacuum_circle(self):
        self.run_command('poststate', dx='1e6', x_m='0.3', format='json')
        document = json.loads((self.root / 'poststate.json').read_text())
        results = document['metadata']['results']
        for curve in ('pre', 'post'):
            self.assertAlmostEqual(results[curve]['std_x'], 0.5, delta=1e-9)
            self.assertAlmostEqual(results[curve]['std_y'], 0.5, delta=1e-9)
        self.assertAlmostEqual(results['post']['center_x'], 0.0, delta=1e-9)
