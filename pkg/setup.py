import sys
from setuptools import setup, find_packages

from qfair.versions import version

# find_packages()
# 默认在和 setup.py 同一目录下搜索各个含有 __init__.py 的包，测试目录不打包
# find_packages(exclude=["*.tests", "*.tests.*", "tests.*", "tests"])

# 检查 setup.py 是不是正确，如果只输出 running check，那么就ok了
# python setup.py check

# setup.py文件的使用：
# python setup.py sdist bdist_wheel # 打包 wheels 格式的包
# pip install -e .                  # 开发时安装

"""

pip install -U qfair

# 打包需要安装 twine
# 如果报错：error: invalid command 'bdist_wheel'，多半是 setuptools 版本不正确或者没有安装 wheel

# 检查错误
# twine check dist/*

"""

if sys.argv[-1] == 'up':
    import os

    os.system('python setup.py sdist bdist_wheel')
    os.system('twine upload dist/*')
    sys.exit()

setup(
    # 名称
    name="qfair",
    # 版本
    version=version,
    # 简单描述
    description="含噪声量子决策模型的 (ε,δ)-公平性验证：Lipschitz 常数、偏差核和偏差对",
    # 详细描述
    long_description=open('README.rst', encoding='utf-8').read(),
    # 授权信息
    license="GNU GPL 3",
    # 作者
    author="lds",
    # 作者的邮箱地址
    author_email="85176878@qq.com",

    # 需要处理的包目录（包含__init__.py的文件夹）
    packages=find_packages(exclude=["tests", "tests.*"]),
    # 软件平台列表
    platforms="any",
    # 所属分类列表
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License (GPL)',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    python_requires='>=3.8',
    # 需要安装的依赖包
    install_requires=[
        'numpy>=1.21',
        'opt_einsum>=3.3',
        'pandas>=1.3',
        'chardet',
        'colorama>=0.4.6',
        'configobj>=5.0.6',
    ],
    extras_require={
        'dev': [
            'pytest>=7.0',
        ],
    },
    # 命令行入口
    entry_points={
        'console_scripts': [
            'qfair = qfair.cmd:main'
        ]
    },
)
