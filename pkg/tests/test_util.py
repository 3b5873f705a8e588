# -*- coding: utf-8 -*-
from colorama import Fore

from qfair.file import get_encoding, json_read, json_save
from qfair.time import Timer, second_to_time_str
from qfair.util import attrdict, echo, error, warn


def test_echo_goes_to_stderr(capsys):
    echo('开始', 1)
    warn('注意')
    error('失败')
    echo('不显示', is_print=False)
    captured = capsys.readouterr()
    assert captured.out == ''
    assert '开始 1' in captured.err
    assert Fore.YELLOW in captured.err and '注意' in captured.err
    assert '失败' in captured.err and Fore.RED in captured.err
    assert '不显示' not in captured.err


def test_attrdict():
    data = attrdict(a=1)
    data.b = 2
    assert data['b'] == 2 and data.a == 1


def test_second_to_time_str():
    assert second_to_time_str(1.5) == '1.500秒'
    assert second_to_time_str(61) == '1分1.000秒'
    assert second_to_time_str(3661) == '1小时1分1.000秒'


def test_timer(capsys):
    with Timer('求解', is_print=True) as timer:
        pass
    elapsed = timer.elapsed
    assert elapsed >= 0
    assert timer.elapsed == elapsed
    assert '结束运行 求解' in capsys.readouterr().err


def test_json_save_creates_folder(tmp_path):
    path = tmp_path / 'a' / 'b.json'
    json_save({'名字': [1, 2.5]}, str(path))
    assert json_read(str(path)) == {'名字': [1, 2.5]}
    assert '名字' in path.read_text(encoding='utf-8')


def test_get_encoding(tmp_path):
    path = tmp_path / 'ascii.csv'
    path.write_bytes(b'a,b\n1,2\n')
    assert get_encoding(str(path)) == 'utf-8'
