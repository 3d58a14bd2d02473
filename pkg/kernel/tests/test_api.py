"""
Tests for the HTTP API.
"""
from pathlib import Path

from django.conf import settings
from rest_framework import status
from rest_framework.test import APITestCase

from ..models import ConversionRecord, DerivationRecord

FIXTURES = Path(__file__).resolve().parent.parent / 'fixtures' / 'derivations'

G1 = '(cons unit o)'
O1 = f'(tysub o (empty {G1}))'
G2 = f'(cons {G1} {O1})'


class TestCheckDerivationView(APITestCase):
    def test_check_accepted(self):
        data = {'text': (FIXTURES / 'proj_beta.drv').read_text()}
        response = self.client.post('/api/check', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data['status'], 'accepted')
        self.assertEqual(response.data['size'], 8)
        self.assertIn('proj-beta', response.data['rules_used'])
        self.assertIn('derivation_id', response.data)

    def test_check_rejected_at_the_root(self):
        data = {'text': f'(rule cong-unit (concl (ctx-eq {G1} {G1})) (side) (prem))'}
        response = self.client.post('/api/check', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data['status'], 'rejected')
        self.assertEqual(response.data['error_path'], [])
        self.assertTrue(response.data['error'])

    def test_check_unparsable(self):
        response = self.client.post('/api/check', {'text': '(rule'}, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data['status'], 'rejected')
        self.assertIsNone(response.data['error_path'])

    def test_check_deeply_nested_text(self):
        response = self.client.post('/api/check', {'text': '(' * 5000 + ')' * 5000}, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data['status'], 'rejected')
        self.assertIn('nested deeper', response.data['error'])

    def test_check_missing_text(self):
        response = self.client.post('/api/check', {}, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(DerivationRecord.objects.count(), 0)


class TestViewDerivationView(APITestCase):
    def setUp(self):
        self.record = DerivationRecord.objects.create(text='(rule cong-unit (concl (ctx-eq unit unit)) (side) (prem))')

    def test_view_derivation(self):
        response = self.client.get(f'/api/derivations/{self.record.id}')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertEqual(response.data['status'], 'pending')
        self.assertIn('text', response.data)

    def test_view_nonexistent_derivation(self):
        response = self.client.get('/api/derivations/99999')
        self.assertEqual(response.status_code, status.HTTP_404_NOT_FOUND)


class TestDecideView(APITestCase):
    def test_pure_equality(self):
        data = {'left': '(p o)', 'right': f'(empty {G1})'}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data['equal'])
        self.assertTrue(response.data['decided'])
        self.assertEqual(response.data['judgment'], f'(sub-eq {G1} (p o) (empty {G1}) unit)')
        self.assertTrue(response.data['derivation'])

    def test_pure_inequality(self):
        data = {'left': f'(q {O1})', 'right': f'(tmsub (q o) (p {O1}))'}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertFalse(response.data['equal'])
        self.assertTrue(response.data['decided'])
        self.assertEqual(response.data['left_normal_form'], f'(q {O1})')
        self.assertNotEqual(response.data['left_normal_form'], response.data['right_normal_form'])

    def test_equality_by_search(self):
        data = {'left': '(tysub n1 (p o))', 'right': f'(tysub n1 (empty {G1}))'}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertTrue(response.data['equal'])

    def test_search_gives_up(self):
        data = {'left': 'n1', 'right': 'o', 'depth': 2}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_200_OK)
        self.assertFalse(response.data['equal'])
        self.assertFalse(response.data['decided'])
        self.assertIn('explored', response.data)

    def test_context_that_does_not_fit(self):
        data = {'context': G2, 'left': '(p o)', 'right': f'(empty {G1})'}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_different_sorts(self):
        data = {'left': 'unit', 'right': 'o'}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('error', response.data)

    def test_unparsable_entity(self):
        data = {'left': '(frob)', 'right': 'o'}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_negative_depth(self):
        data = {'left': 'o', 'right': 'o', 'depth': -1}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)

    def test_depth_above_the_limit(self):
        data = {'left': 'n1', 'right': 'o', 'depth': settings.CWF_MAX_SEARCH_DEPTH + 1}
        response = self.client.post('/api/decide', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('depth', response.data['error'])


class TestConvertView(APITestCase):
    def test_convert_found(self):
        data = {'source': '(S K K S)', 'target': 'S', 'bound': 4}
        response = self.client.post('/api/cl/convert', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertTrue(response.data['found'])
        self.assertEqual(response.data['source'], '(((S K) K) S)')
        self.assertTrue(response.data['trace'].startswith('(trace'))
        self.assertEqual(response.data['derivation']['status'], 'accepted')

    def test_convert_not_within_bound(self):
        data = {'source': 'K', 'target': 'S', 'bound': 3}
        response = self.client.post('/api/cl/convert', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertFalse(response.data['found'])
        self.assertIsNone(response.data['derivation'])
        self.assertEqual(ConversionRecord.objects.count(), 1)

    def test_bound_above_the_limit(self):
        data = {'source': 'K', 'target': 'S', 'bound': settings.CWF_MAX_CONVERT_BOUND + 1}
        response = self.client.post('/api/cl/convert', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertEqual(ConversionRecord.objects.count(), 0)

    def test_convert_bad_term(self):
        data = {'source': 'I', 'target': 'S'}
        response = self.client.post('/api/cl/convert', data, format='json')
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn('error', response.data)
